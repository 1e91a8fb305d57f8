#include "igc/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include "igc/error.hpp"
#include "numeric_text.hpp"

namespace igc {

namespace {

using detail::format17;
using detail::trim;

using NumRef = double& (*)(ScenarioConfig&);
using IntRef = int& (*)(ScenarioConfig&);
using SeedRef = std::uint64_t& (*)(ScenarioConfig&);
using BoolRef = bool& (*)(ScenarioConfig&);
using TextRef = std::string& (*)(ScenarioConfig&);
struct ChoiceRef {
  std::string (*get)(const ScenarioConfig&);
  bool (*set)(ScenarioConfig&, std::string_view);
  const char* allowed;
};

struct Field {
  const char* section;
  const char* key;
  bool required;
  std::variant<NumRef, IntRef, SeedRef, BoolRef, TextRef, ChoiceRef> ref;
};

#define IGC_NUM(sec, key, req, expr) \
  Field { sec, key, req, NumRef{[](ScenarioConfig& c) -> double& { return expr; }} }

bool set_leader_kind(ScenarioConfig& c, std::string_view v) {
  for (LeaderKind k : {LeaderKind::AscendingLoiter, LeaderKind::Lazy8, LeaderKind::Constant,
                       LeaderKind::Tabulated}) {
    if (v == to_string(k)) {
      c.leader.kind = k;
      return true;
    }
  }
  return false;
}

bool set_c2_form(ScenarioConfig& c, std::string_view v) {
  if (v == "rederived") c.vehicle.c2_form = C2Form::Rederived;
  else if (v == "printed") c.vehicle.c2_form = C2Form::Printed;
  else return false;
  return true;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      IGC_NUM("vehicle", "m_g", true, c.vehicle.mass),
      IGC_NUM("vehicle", "g", true, c.vehicle.gravity),
      IGC_NUM("vehicle", "rho", true, c.vehicle.rho),
      IGC_NUM("vehicle", "s", true, c.vehicle.S),
      IGC_NUM("vehicle", "b", true, c.vehicle.b),
      IGC_NUM("vehicle", "c", true, c.vehicle.c),
      IGC_NUM("vehicle", "j_x", true, c.vehicle.Jx),
      IGC_NUM("vehicle", "j_y", true, c.vehicle.Jy),
      IGC_NUM("vehicle", "j_z", true, c.vehicle.Jz),
      IGC_NUM("vehicle", "j_xz", true, c.vehicle.Jxz),
      IGC_NUM("vehicle", "c_lift0", true, c.vehicle.CL0),
      IGC_NUM("vehicle", "c_lift_alpha", true, c.vehicle.CLalpha),
      IGC_NUM("vehicle", "c_lift_q", true, c.vehicle.CLq),
      IGC_NUM("vehicle", "c_lift_de", true, c.vehicle.CLde),
      IGC_NUM("vehicle", "c_drag0", true, c.vehicle.CD0),
      IGC_NUM("vehicle", "c_drag_alpha", true, c.vehicle.CDalpha),
      IGC_NUM("vehicle", "c_drag_q", true, c.vehicle.CDq),
      IGC_NUM("vehicle", "c_drag_de", true, c.vehicle.CDde),
      IGC_NUM("vehicle", "c_y0", true, c.vehicle.CY0),
      IGC_NUM("vehicle", "c_y_beta", true, c.vehicle.CYbeta),
      IGC_NUM("vehicle", "c_y_p", true, c.vehicle.CYp),
      IGC_NUM("vehicle", "c_y_r", true, c.vehicle.CYr),
      IGC_NUM("vehicle", "c_y_da", true, c.vehicle.CYda),
      IGC_NUM("vehicle", "c_y_dr", true, c.vehicle.CYdr),
      IGC_NUM("vehicle", "c_roll0", true, c.vehicle.Cl0),
      IGC_NUM("vehicle", "c_roll_beta", true, c.vehicle.Clbeta),
      IGC_NUM("vehicle", "c_roll_p", true, c.vehicle.Clp),
      IGC_NUM("vehicle", "c_roll_r", true, c.vehicle.Clr),
      IGC_NUM("vehicle", "c_roll_da", true, c.vehicle.Clda),
      IGC_NUM("vehicle", "c_roll_dr", true, c.vehicle.Cldr),
      IGC_NUM("vehicle", "c_m0", true, c.vehicle.Cm0),
      IGC_NUM("vehicle", "c_m_alpha", true, c.vehicle.Cmalpha),
      IGC_NUM("vehicle", "c_m_q", true, c.vehicle.Cmq),
      IGC_NUM("vehicle", "c_m_de", true, c.vehicle.Cmde),
      IGC_NUM("vehicle", "c_n0", true, c.vehicle.Cn0),
      IGC_NUM("vehicle", "c_n_beta", true, c.vehicle.Cnbeta),
      IGC_NUM("vehicle", "c_n_p", true, c.vehicle.Cnp),
      IGC_NUM("vehicle", "c_n_r", true, c.vehicle.Cnr),
      IGC_NUM("vehicle", "c_n_da", true, c.vehicle.Cnda),
      IGC_NUM("vehicle", "c_n_dr", true, c.vehicle.Cndr),
      IGC_NUM("vehicle", "prop_d", true, c.vehicle.prop_D),
      IGC_NUM("vehicle", "c_t0", true, c.vehicle.CT0),
      IGC_NUM("vehicle", "c_t1", true, c.vehicle.CT1),
      IGC_NUM("vehicle", "c_t2", true, c.vehicle.CT2),
      IGC_NUM("vehicle", "c_q0", true, c.vehicle.CQ0),
      IGC_NUM("vehicle", "c_q1", true, c.vehicle.CQ1),
      IGC_NUM("vehicle", "c_q2", true, c.vehicle.CQ2),
      IGC_NUM("vehicle", "k_v", true, c.vehicle.KV),
      IGC_NUM("vehicle", "k_q", true, c.vehicle.KQ),
      IGC_NUM("vehicle", "r_motor", true, c.vehicle.R_motor),
      IGC_NUM("vehicle", "v_max", true, c.vehicle.V_max),
      IGC_NUM("vehicle", "i0", true, c.vehicle.i0),
      IGC_NUM("vehicle", "j_p", true, c.vehicle.Jp),
      IGC_NUM("vehicle", "max_deflection_deg", false, c.max_deflection.deg),
      Field{"vehicle", "c2_form", false,
            ChoiceRef{[](const ScenarioConfig& c) -> std::string {
                        return c.vehicle.c2_form == C2Form::Printed ? "printed" : "rederived";
                      },
                      set_c2_form, "rederived, printed"}},

      IGC_NUM("gains.range", "kp0", true, c.range.K0),
      IGC_NUM("gains.range", "kp1", true, c.range.K1),
      IGC_NUM("gains.range", "kp2", true, c.range.K2),
      IGC_NUM("gains.range", "ks0", true, c.range.k0),
      IGC_NUM("gains.range", "ks1", true, c.range.k1),
      IGC_NUM("gains.range", "ks2", true, c.range.k2),
      IGC_NUM("gains.range", "tau1", true, c.range.tau1),
      IGC_NUM("gains.range", "tau2", true, c.range.tau2),
      IGC_NUM("gains.range", "phi", false, c.range.phi),
      IGC_NUM("gains.range", "w1", false, c.range.w1),
      IGC_NUM("gains.range", "v_cmd_min", false, c.range.v_cmd_min),
      IGC_NUM("gains.range", "v_cmd_max", false, c.range.v_cmd_max),
      IGC_NUM("gains.range", "d_bar0", false, c.range.d_bar0),
      IGC_NUM("gains.range", "d_bar1", false, c.range.d_bar1),
      IGC_NUM("gains.range", "d_bar2", false, c.range.d_bar2),

      IGC_NUM("gains.bearing", "kp0_gamma", true, c.bearing.K0(0)),
      IGC_NUM("gains.bearing", "kp0_chi", true, c.bearing.K0(1)),
      IGC_NUM("gains.bearing", "kp1_alpha", true, c.bearing.K1(0)),
      IGC_NUM("gains.bearing", "kp1_beta", true, c.bearing.K1(1)),
      IGC_NUM("gains.bearing", "kp1_mu", true, c.bearing.K1(2)),
      IGC_NUM("gains.bearing", "kp2_p", true, c.bearing.K2(0)),
      IGC_NUM("gains.bearing", "kp2_q", true, c.bearing.K2(1)),
      IGC_NUM("gains.bearing", "kp2_r", true, c.bearing.K2(2)),
      IGC_NUM("gains.bearing", "ks0", true, c.bearing.k0),
      IGC_NUM("gains.bearing", "ks1", true, c.bearing.k1),
      IGC_NUM("gains.bearing", "ks2", true, c.bearing.k2),
      IGC_NUM("gains.bearing", "tau1_alpha", true, c.bearing.tau1(0)),
      IGC_NUM("gains.bearing", "tau1_beta", true, c.bearing.tau1(1)),
      IGC_NUM("gains.bearing", "tau1_mu", true, c.bearing.tau1(2)),
      IGC_NUM("gains.bearing", "tau2_p", true, c.bearing.tau2(0)),
      IGC_NUM("gains.bearing", "tau2_q", true, c.bearing.tau2(1)),
      IGC_NUM("gains.bearing", "tau2_r", true, c.bearing.tau2(2)),
      IGC_NUM("gains.bearing", "eps_norm", false, c.bearing.eps_norm),
      IGC_NUM("gains.bearing", "w2", false, c.bearing.w2),
      IGC_NUM("gains.bearing", "alpha_max_deg", false, c.bearing.alpha_max.deg),
      IGC_NUM("gains.bearing", "d_bar0", false, c.bearing.d_bar0),
      IGC_NUM("gains.bearing", "d_bar1", false, c.bearing.d_bar1),
      IGC_NUM("gains.bearing", "d_bar2", false, c.bearing.d_bar2),

      Field{"leader", "kind", true,
            ChoiceRef{[](const ScenarioConfig& c) -> std::string { return to_string(c.leader.kind); },
                      set_leader_kind, "ascending_loiter, lazy8, constant, tabulated"}},
      IGC_NUM("leader", "v", true, c.leader.V),
      IGC_NUM("leader", "x", true, c.leader.pos0(0)),
      IGC_NUM("leader", "y", true, c.leader.pos0(1)),
      IGC_NUM("leader", "z", true, c.leader.pos0(2)),
      IGC_NUM("leader", "gamma_deg", false, c.leader.gamma0.deg),
      IGC_NUM("leader", "chi_deg", false, c.leader.chi0.deg),
      IGC_NUM("leader", "loiter_chi_rate", false, c.leader.loiter_chi_rate),
      Field{"leader", "table", false,
            TextRef{[](ScenarioConfig& c) -> std::string& { return c.leader.table_path; }}},

      IGC_NUM("follower", "x", true, c.follower.pos(0)),
      IGC_NUM("follower", "y", true, c.follower.pos(1)),
      IGC_NUM("follower", "z", true, c.follower.pos(2)),
      IGC_NUM("follower", "v", false, c.follower.V),
      IGC_NUM("follower", "gamma_deg", false, c.follower.gamma.deg),
      IGC_NUM("follower", "chi_deg", false, c.follower.chi.deg),
      Field{"follower", "trim", false,
            BoolRef{[](ScenarioConfig& c) -> bool& { return c.follower.trim; }}},
      IGC_NUM("follower", "alpha_deg", false, c.follower.alpha.deg),
      IGC_NUM("follower", "beta_deg", false, c.follower.beta.deg),
      IGC_NUM("follower", "mu_deg", false, c.follower.mu.deg),
      IGC_NUM("follower", "p", false, c.follower.p),
      IGC_NUM("follower", "q", false, c.follower.q),
      IGC_NUM("follower", "r", false, c.follower.r),
      IGC_NUM("follower", "omega", false, c.follower.omega),

      IGC_NUM("formation", "r_d", true, c.formation.r_d),
      IGC_NUM("formation", "sigma_fd_gamma_deg", true, c.formation.sigma_fd_gamma.deg),
      IGC_NUM("formation", "sigma_fd_chi_deg", true, c.formation.sigma_fd_chi.deg),
      IGC_NUM("formation", "ebar_gamma_deg", true, c.formation.ebar_gamma.deg),
      IGC_NUM("formation", "ebar_chi_deg", true, c.formation.ebar_chi.deg),

      Field{"sim", "name", false,
            TextRef{[](ScenarioConfig& c) -> std::string& { return c.name; }}},
      IGC_NUM("sim", "dt", false, c.sim.dt),
      IGC_NUM("sim", "t_final", false, c.sim.t_final),
      Field{"sim", "log_decimation", false,
            IntRef{[](ScenarioConfig& c) -> int& { return c.sim.log_decimation; }}},
      IGC_NUM("sim", "band_range", false, c.sim.band_range),
      IGC_NUM("sim", "band_angle_deg", false, c.sim.band_angle.deg),
      Field{"sim", "disturbance_seed", false,
            SeedRef{[](ScenarioConfig& c) -> std::uint64_t& { return c.sim.disturbance.seed; }}},
      IGC_NUM("sim", "disturbance_speed", false, c.sim.disturbance.speed),
      IGC_NUM("sim", "disturbance_attitude", false, c.sim.disturbance.attitude),
      IGC_NUM("sim", "disturbance_rate", false, c.sim.disturbance.rate),
      IGC_NUM("sim", "disturbance_rotor", false, c.sim.disturbance.rotor),

      Field{"output", "trajectory", false,
            TextRef{[](ScenarioConfig& c) -> std::string& { return c.output.trajectory; }}},
      Field{"output", "metrics", false,
            TextRef{[](ScenarioConfig& c) -> std::string& { return c.output.metrics; }}},
  };
  return table;
}

#undef IGC_NUM

constexpr const char* kSections[] = {"vehicle", "gains.range", "gains.bearing", "leader",
                                     "follower", "formation", "sim", "output"};

std::string path_of(const Field& f) { return std::string(f.section) + "." + f.key; }

struct Entry {
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

std::string where(int line) {
  return line > 0 ? "line " + std::to_string(line) + ": " : std::string("override: ");
}

[[noreturn]] void parse_error(const std::string& key, int line, const std::string& what) {
  throw Error(ErrorCode::Parse, key, where(line) + what);
}

bool valid_key(std::string_view k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_' || ch == '.';
  });
}

// Value text after '=': a double-quoted string or a bare token; a trailing
// '#' comment is allowed in both cases.
std::string read_value(std::string_view raw, const std::string& key, int line) {
  raw = trim(raw);
  if (!raw.empty() && raw.front() == '"') {
    const auto close = raw.find('"', 1);
    if (close == std::string_view::npos) parse_error(key, line, "unterminated string");
    const std::string_view rest = trim(raw.substr(close + 1));
    if (!rest.empty() && rest.front() != '#') {
      parse_error(key, line, "unexpected text after string value");
    }
    return std::string(raw.substr(1, close - 1));
  }
  const auto hash = raw.find('#');
  return std::string(trim(raw.substr(0, hash)));
}

std::map<std::string, Entry> read_entries(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      const auto close = line.find(']');
      const std::string_view rest = close == std::string_view::npos ? "" : trim(line.substr(close + 1));
      if (close == std::string_view::npos || (!rest.empty() && rest.front() != '#')) {
        parse_error("section", line_no, "malformed section header");
      }
      section = std::string(trim(line.substr(1, close - 1)));
      if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections)) {
        parse_error(section, line_no, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error("syntax", line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) parse_error(key, line_no, "keys are lowercase snake_case");
    if (section.empty()) parse_error(key, line_no, "key outside of any section");
    const std::string path = section + "." + key;
    std::string value = read_value(line.substr(eq + 1), path, line_no);
    if (!entries.emplace(path, Entry{std::move(value), line_no}).second) {
      parse_error(path, line_no, "duplicate key " + path);
    }
  }
  return entries;
}

const Field* find_field(const std::string& path) {
  for (const Field& f : fields()) {
    if (path_of(f) == path) return &f;
  }
  return nullptr;
}

void assign(ScenarioConfig& c, const Field& f, const Entry& e) {
  const std::string path = path_of(f);
  const std::string_view v = e.value;
  std::visit(
      [&](auto ref) {
        using R = decltype(ref);
        if constexpr (std::is_same_v<R, NumRef>) {
          if (!detail::parse_finite(v, ref(c))) {
            parse_error(path, e.line, path + " expects a finite number, got '" + e.value + "'");
          }
        } else if constexpr (std::is_same_v<R, IntRef> || std::is_same_v<R, SeedRef>) {
          if (!detail::parse_integer(v, ref(c))) {
            parse_error(path, e.line, path + " expects an integer, got '" + e.value + "'");
          }
        } else if constexpr (std::is_same_v<R, BoolRef>) {
          if (v == "true") ref(c) = true;
          else if (v == "false") ref(c) = false;
          else parse_error(path, e.line, path + " expects true or false, got '" + e.value + "'");
        } else if constexpr (std::is_same_v<R, TextRef>) {
          ref(c) = e.value;
        } else {
          if (!ref.set(c, v)) {
            parse_error(path, e.line,
                        path + " must be one of " + ref.allowed + ", got '" + e.value + "'");
          }
        }
      },
      f.ref);
}

std::string render(ScenarioConfig& c, const Field& f) {
  return std::visit(
      [&](auto ref) -> std::string {
        using R = decltype(ref);
        if constexpr (std::is_same_v<R, NumRef>) {
          return format17(ref(c));
        } else if constexpr (std::is_same_v<R, IntRef> || std::is_same_v<R, SeedRef>) {
          return std::to_string(ref(c));
        } else if constexpr (std::is_same_v<R, BoolRef>) {
          return ref(c) ? "true" : "false";
        } else if constexpr (std::is_same_v<R, TextRef>) {
          return "\"" + ref(c) + "\"";
        } else {
          return ref.get(c);
        }
      },
      f.ref);
}

std::string read_file(const std::filesystem::path& path, const std::string& key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, key, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ConfigOverride parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::Parse, std::string(text), "override must look like section.key=value");
  }
  return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

std::vector<TabulatedRate> parse_leader_table(std::string_view text) {
  std::vector<TabulatedRate> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view l = trim(line);
    if (l.empty() || l.front() == '#' || (l.front() >= 'a' && l.front() <= 'z')) continue;
    double v[3];
    std::string_view rest = l;
    for (int i = 0; i < 3; ++i) {
      const auto comma = rest.find(',');
      const std::string_view cell = trim(rest.substr(0, comma));
      if (!detail::parse_finite(cell, v[i]) || (i < 2 && comma == std::string_view::npos)) {
        parse_error("leader.table", line_no, "expected three numbers t, gamma_dot, chi_dot");
      }
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (!trim(rest).empty()) parse_error("leader.table", line_no, "expected three columns");
    rows.push_back({v[0], v[1], v[2]});
  }
  return rows;
}

ParsedConfig parse_config(std::string_view text, std::span<const ConfigOverride> overrides,
                          const std::filesystem::path& base_dir) {
  std::map<std::string, Entry> entries = read_entries(text);
  for (const ConfigOverride& o : overrides) {
    if (!find_field(o.key)) parse_error(o.key, 0, "unknown key " + o.key);
    entries[o.key] = Entry{o.value, 0};
  }

  for (const auto& [path, entry] : entries) {
    if (!find_field(path)) parse_error(path, entry.line, "unknown key " + path);
  }

  ParsedConfig out;
  ScenarioConfig& c = out.config;
  for (const Field& f : fields()) {
    const auto it = entries.find(path_of(f));
    if (it != entries.end()) {
      assign(c, f, it->second);
    } else if (f.required) {
      throw Error(ErrorCode::Parse, path_of(f), "missing required key " + path_of(f));
    }
  }

  if (c.leader.kind == LeaderKind::Tabulated) {
    if (c.leader.table_path.empty()) {
      throw Error(ErrorCode::Parse, "leader.table", "tabulated leader needs leader.table");
    }
    std::filesystem::path p = c.leader.table_path;
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    c.leader.table = parse_leader_table(read_file(p, "leader.table"));
  }

  try {
    validate_scenario(c);
  } catch (const Error& e) {
    const auto it = entries.find(e.guard());
    if (it == entries.end()) throw;
    throw Error(e.code(), e.guard(), where(it->second.line) + e.what());
  }
  out.warnings = feasibility_warnings(c);
  return out;
}

ParsedConfig load_config_file(const std::filesystem::path& path,
                              std::span<const ConfigOverride> overrides) {
  return parse_config(read_file(path, "config"), overrides, path.parent_path());
}

std::string serialize_config(const ScenarioConfig& config) {
  ScenarioConfig c = config;
  std::string out;
  const char* section = "";
  for (const Field& f : fields()) {
    if (std::string_view(section) != f.section) {
      if (*section) out += '\n';
      section = f.section;
      out += "[";
      out += section;
      out += "]\n";
    }
    out += f.key;
    out += " = ";
    out += render(c, f);
    out += '\n';
  }
  return out;
}

std::uint64_t config_hash(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : serialize_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.push_back(path_of(f));
  return out;
}

}  // namespace igc

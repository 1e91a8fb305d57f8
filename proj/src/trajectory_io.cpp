#include "igc/trajectory_io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "igc/config.hpp"
#include "igc/error.hpp"
#include "numeric_text.hpp"

namespace igc {

using detail::format17;
using detail::trim;
using nlohmann::json;

std::string hex64(std::uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string write_trajectory(const TrajectoryLog& log, const CsvOptions& options) {
  std::string out;
  out += "#config_hash: " + hex64(log.config_hash) + "\n";
  out += "#disturbance_seed: " + std::to_string(log.disturbance_seed) + "\n";
  if (!options.timestamp.empty()) out += "#generated: " + options.timestamp + "\n";
  for (const auto& w : log.warnings) out += "#warning: " + w + "\n";
  if (log.fault) {
    const FaultRecord& f = *log.fault;
    out += "#fault: t=" + format17(f.t) + " code=" + f.code + " guard=" + f.guard +
           " message=" + f.message + "\n";
  }

  const auto cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i].name;
  }
  out += '\n';
  for (const TrajectoryRow& row : log.rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ',';
      out += format17(row.*(cols[i].field));
    }
    out += '\n';
  }
  return out;
}

namespace {

[[noreturn]] void csv_error(int line, const std::string& what) {
  throw Error(ErrorCode::Parse, "trajectory", "line " + std::to_string(line) + ": " + what);
}

bool take_prefix(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  s.remove_prefix(prefix.size());
  return true;
}

// "t=<num> code=<tok> guard=<tok> message=<rest of line>"
FaultRecord parse_fault(std::string_view s, int line) {
  FaultRecord f;
  auto token = [&](std::string_view key) {
    if (!take_prefix(s, key)) csv_error(line, "malformed fault record");
    const auto sp = s.find(' ');
    const std::string_view v = s.substr(0, sp);
    s = sp == std::string_view::npos ? std::string_view{} : s.substr(sp + 1);
    return v;
  };
  if (!detail::parse_any(token("t="), f.t)) csv_error(line, "malformed fault time");
  f.code = token("code=");
  f.guard = token("guard=");
  if (!take_prefix(s, "message=")) csv_error(line, "malformed fault record");
  f.message = s;
  return f;
}

}  // namespace

TrajectoryLog read_trajectory(std::string_view text) {
  TrajectoryLog log;
  const auto cols = trajectory_columns();
  bool header_seen = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (line.front() == '#') {
      std::string_view body = line.substr(1);
      if (take_prefix(body, "config_hash: ")) {
        if (!take_prefix(body, "0x") ||
            std::from_chars(body.data(), body.data() + body.size(), log.config_hash, 16).ec !=
                std::errc{}) {
          csv_error(line_no, "malformed config hash");
        }
      } else if (take_prefix(body, "disturbance_seed: ")) {
        if (!detail::parse_integer(body, log.disturbance_seed)) csv_error(line_no, "malformed seed");
      } else if (take_prefix(body, "warning: ")) {
        log.warnings.emplace_back(body);
      } else if (take_prefix(body, "fault: ")) {
        if (log.fault) csv_error(line_no, "more than one fault record");
        log.fault = parse_fault(body, line_no);
      }
      continue;
    }

    if (!header_seen) {
      std::size_t i = 0;
      for (std::size_t start = 0; start <= line.size(); ++i) {
        const auto comma = line.find(',', start);
        const std::string_view name = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        if (i >= cols.size() || name != cols[i].name) {
          csv_error(line_no, "unexpected column '" + std::string(name) + "'");
        }
        start = comma == std::string_view::npos ? line.size() + 1 : comma + 1;
      }
      if (i != cols.size()) csv_error(line_no, "header has too few columns");
      header_seen = true;
      continue;
    }

    TrajectoryRow row;
    std::string_view rest = line;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto comma = rest.find(',');
      const bool last = i + 1 == cols.size();
      if (last != (comma == std::string_view::npos)) csv_error(line_no, "wrong column count");
      if (!detail::parse_any(trim(rest.substr(0, comma)), row.*(cols[i].field))) {
        csv_error(line_no, std::string("bad number in column ") + cols[i].name);
      }
      if (!last) rest = rest.substr(comma + 1);
    }
    log.rows.push_back(row);
  }
  if (!header_seen) csv_error(line_no, "missing header row");
  return log;
}

namespace {

json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// NaN and infinities have no JSON spelling.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json settling_json(const SettlingResult& s) {
  return {{"time_s", opt_number(s.time)}, {"max_after", number(s.max_after)}};
}

}  // namespace

std::string metrics_json(const ScenarioConfig& config, const TrajectoryLog& log,
                         const MetricsReport& m) {
  json j;
  j["scenario"] = config.name;
  j["config_hash"] = hex64(log.config_hash);
  j["disturbance_seed"] = log.disturbance_seed;
  j["rows"] = m.rows;
  j["t_end_s"] = m.t_end;
  j["settling"] = {{"range_m", settling_json(m.range)},
                   {"elevation_rad", settling_json(m.elevation)},
                   {"azimuth_rad", settling_json(m.azimuth)},
                   {"all_s", opt_number(m.settled_all)}};
  j["bands"] = {{"range_m", m.band_range}, {"angle_rad", m.band_angle}};
  j["barrier_margin_min_rad"] = {{"gamma", number(m.min_margin_gamma)},
                                 {"chi", number(m.min_margin_chi)}};
  j["behind_leader_fraction"] = m.behind_fraction;
  j["min_cos_sigma_f_after_settling"] = number(m.min_cos_sigma_f_after);
  j["max_speed_mismatch_after_settling_mps"] = number(m.max_speed_mismatch_after);
  j["speed_relation"] = {{"residual_mps", number(m.speed_relation_residual)},
                         {"samples", m.speed_relation_samples}};
  j["saturation_duty"] = {{"throttle", m.throttle_sat_duty},
                          {"surface", m.surface_sat_duty},
                          {"speed_cmd", m.speed_cmd_sat_duty},
                          {"thrust", m.thrust_sat_duty},
                          {"alpha_cmd", m.alpha_cmd_sat_duty}};
  j["warnings"] = log.warnings;
  if (log.fault) {
    j["fault"] = {{"t_s", log.fault->t},
                  {"code", log.fault->code},
                  {"guard", log.fault->guard},
                  {"message", log.fault->message}};
  } else {
    j["fault"] = nullptr;
  }
  return j.dump(2) + "\n";
}

namespace {

json report_json(const GainReport& r) {
  json arr = json::array();
  for (const auto& c : r.conditions) {
    arr.push_back({{"condition", c.name},
                   {"margin", number(c.margin)},
                   {"passed", c.passed},
                   {"informational", c.informational},
                   {"note", c.note}});
  }
  return arr;
}

}  // namespace

std::string gain_report_json(const ScenarioConfig& config, const GainReport& range,
                             const GainReport& bearing, const FeasibilityReport& f) {
  json j;
  j["scenario"] = config.name;
  j["config_hash"] = hex64(config_hash(config));
  j["range"] = report_json(range);
  j["bearing"] = report_json(bearing);
  j["feasibility"] = {{"azimuth_margin_rad", number(f.azimuth_margin)},
                      {"zeta_star_rad", number(f.zeta_star)},
                      {"elevation_margin_rad", number(f.elevation_margin)},
                      {"ebar_gamma_margin_rad", number(f.ebar_gamma_margin)},
                      {"feasible", f.feasible()}};
  j["all_passed"] = range.all_passed() && bearing.all_passed();
  return j.dump(2) + "\n";
}

std::string gain_report_text(const GainReport& report) {
  std::ostringstream out;
  for (const auto& c : report.conditions) {
    out << (c.informational ? "info" : (c.passed ? "pass" : "FAIL")) << "  " << c.name
        << "  margin=" << [&] { char b[32]; std::snprintf(b, sizeof b, "%.6g", c.margin); return std::string(b); }();
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << '\n';
  }
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "output", "cannot write " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "input", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace igc

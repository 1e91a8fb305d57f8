#include "igc/relative_kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "igc/angles.hpp"
#include "igc/error.hpp"

namespace igc {

Eigen::Vector3d AgentKinematics::velocity() const {
  return {V * std::cos(gamma) * std::cos(chi), V * std::cos(gamma) * std::sin(chi),
          -V * std::sin(gamma)};
}

RelativeState relative_state(const AgentKinematics& leader,
                             const AgentKinematics& follower) {
  const Eigen::Vector3d d = leader.pos - follower.pos;
  const double r = d.norm();
  if (!(r >= kMinRange)) {
    throw Error(ErrorCode::DegenerateGeometry, "range",
                "leader-follower range " + std::to_string(r) + " m below minimum");
  }
  RelativeState rel;
  rel.r = r;
  rel.gamma_L = std::asin(std::clamp(-d.z() / r, -1.0, 1.0));
  rel.chi_L = wrap_pi(std::atan2(d.y(), d.x()));
  if (!(std::cos(rel.gamma_L) > kLosGuard)) {
    throw Error(ErrorCode::DegenerateGeometry, "cos_gamma_L",
                "line of sight is vertical");
  }
  return rel;
}

RelativeRates relative_rates(const AgentKinematics& l, const AgentKinematics& f,
                             const RelativeState& rel) {
  const double cgL = std::cos(rel.gamma_L), sgL = std::sin(rel.gamma_L);
  if (!(std::abs(cgL) > kLosGuard)) {
    throw Error(ErrorCode::DegenerateGeometry, "cos_gamma_L",
                "line of sight is vertical");
  }
  const double dl = rel.chi_L - l.chi, df = rel.chi_L - f.chi;
  const double cgl = std::cos(l.gamma), sgl = std::sin(l.gamma);
  const double cgf = std::cos(f.gamma), sgf = std::sin(f.gamma);

  RelativeRates out;
  out.r_dot = l.V * (sgL * sgl + cgL * cgl * std::cos(dl)) -
              f.V * (sgL * sgf + cgL * cgf * std::cos(df));
  out.gamma_L_dot = (l.V * (cgL * sgl - cgl * sgL * std::cos(dl)) -
                     f.V * (cgL * sgf - cgf * sgL * std::cos(df))) /
                    rel.r;
  out.chi_L_dot = (-l.V * cgl * std::sin(dl) + f.V * cgf * std::sin(df)) /
                  (rel.r * cgL);
  return out;
}

BearingAngles bearing_angles(double gamma, double chi, const RelativeState& rel) {
  BearingAngles b;
  b.sigma_gamma = gamma - rel.gamma_L;
  b.sigma_chi = wrap_pi(chi - rel.chi_L);
  b.cos_sigma = std::sin(rel.gamma_L) * std::sin(gamma) +
                std::cos(rel.gamma_L) * std::cos(gamma) * std::cos(rel.chi_L - chi);
  b.cos_sigma = std::clamp(b.cos_sigma, -1.0, 1.0);
  return b;
}

bool behind_predicate(const BearingAngles& leader_bearing) {
  // A leader exactly abeam (sigma_l = pi/2) is not behind; cos(pi/2) only
  // rounds to zero, hence the tolerance.
  return leader_bearing.cos_sigma > kAbeamTolerance;
}

FeasibilityReport feam_feasibility(double sigma_fd_gamma, double sigma_fd_chi,
                                   double ebar_gamma, double ebar_chi) {
  FeasibilityReport rep;
  const double chi_extent = std::abs(sigma_fd_chi) + ebar_chi;
  rep.azimuth_margin = kPi / 2.0 - chi_extent;
  rep.azimuth_ok = rep.azimuth_margin > 0.0;

  const double t = std::tan(chi_extent / 2.0);
  const double t2 = t * t;
  rep.zeta_star = (rep.azimuth_ok && t2 <= 1.0)
                      ? std::acos(t2)
                      : std::numeric_limits<double>::quiet_NaN();
  if (std::isnan(rep.zeta_star)) {
    rep.ebar_gamma_margin = std::numeric_limits<double>::quiet_NaN();
    rep.elevation_margin = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  rep.ebar_gamma_margin = rep.zeta_star - ebar_gamma;
  rep.ebar_gamma_ok = ebar_gamma > 0.0 && rep.ebar_gamma_margin > 0.0;
  rep.elevation_margin = rep.zeta_star - ebar_gamma - std::abs(sigma_fd_gamma);
  rep.elevation_ok = rep.elevation_margin > 0.0;
  return rep;
}

}  // namespace igc

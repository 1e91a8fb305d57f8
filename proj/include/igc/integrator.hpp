#pragma once

#include <array>
#include <cstddef>

namespace igc {

/// Classical fourth-order Runge-Kutta step. `f(t, x)` returns dx/dt; any input
/// held across the step (actuator commands) must be captured by `f`.
template <std::size_t N, typename Derivative>
std::array<double, N> rk4_step(Derivative&& f, const std::array<double, N>& x,
                               double t, double dt) {
  auto axpy = [](const std::array<double, N>& a, double h,
                 const std::array<double, N>& b) {
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + h * b[i];
    return out;
  };
  const std::array<double, N> k1 = f(t, x);
  const std::array<double, N> k2 = f(t + 0.5 * dt, axpy(x, 0.5 * dt, k1));
  const std::array<double, N> k3 = f(t + 0.5 * dt, axpy(x, 0.5 * dt, k2));
  const std::array<double, N> k4 = f(t + dt, axpy(x, dt, k3));
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

}  // namespace igc

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace epiflow {

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t)
      : std::runtime_error(what), t_(t) {}
  double t() const { return t_; }

 private:
  double t_ = 0.0;
};

// Fixed-step integrator settings. output_stride * dt must equal 1.0 day
// exactly so that trajectories land on the daily reporting grid.
struct IntegratorConfig {
  double dt = 0.5;
  int output_stride = 2;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("IntegratorConfig: dt must be > 0");
    if (output_stride < 1 || output_stride * dt != 1.0) {
      throw std::invalid_argument(
          "IntegratorConfig: output_stride * dt must be exactly 1.0 day");
    }
  }
};

// One classical 4th-order Runge-Kutta step. Negative components are clamped
// to zero after the update; the clamped mass is accumulated into
// *clamp_accum when given so callers can assert it stays at float-noise
// level. Throws IntegrationError if the derivative function produces a
// non-finite value.
template <std::size_t N, class Derivs>
std::array<double, N> rk4_step(const std::array<double, N>& y, Derivs&& derivs,
                               double t, double dt,
                               double* clamp_accum = nullptr) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be > 0");
  std::array<double, N> k1{}, k2{}, k3{}, k4{}, tmp{};

  auto check = [&](const std::array<double, N>& k, double at) {
    for (double v : k) {
      if (!std::isfinite(v)) {
        std::ostringstream oss;
        oss << "non-finite derivative at t=" << at << " state=[";
        for (std::size_t i = 0; i < N; ++i) oss << (i ? "," : "") << y[i];
        oss << "]";
        throw IntegrationError(oss.str(), at);
      }
    }
  };

  derivs(t, y, k1);
  check(k1, t);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  derivs(t + 0.5 * dt, tmp, k2);
  check(k2, t + 0.5 * dt);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  derivs(t + 0.5 * dt, tmp, k3);
  check(k3, t + 0.5 * dt);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + dt * k3[i];
  derivs(t + dt, tmp, k4);
  check(k4, t + dt);

  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (out[i] < 0.0) {
      if (clamp_accum) *clamp_accum += -out[i];
      out[i] = 0.0;
    }
  }
  return out;
}

}  // namespace epiflow

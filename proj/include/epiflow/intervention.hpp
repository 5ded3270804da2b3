#pragma once

#include <algorithm>
#include <array>

namespace epiflow {

// Transmission-rate schedule: four change points, each ramping linearly from
// the previous level to the next over its own duration.
struct InterventionParams {
  std::array<double, 5> lambda{};  // levels before/after each change point
  std::array<double, 4> onset{};   // ramp start times (days)
  std::array<double, 4> duration{};

  // lambda(t) = lambda0 + sum_k progress_k(t) * (lambda_k - lambda_{k-1}).
  // Continuous everywhere; exact piece-wise linear when ramps do not overlap
  // and still well defined when prior draws make them overlap.
  double at(double t) const {
    double v = lambda[0];
    for (int k = 0; k < 4; ++k) {
      const double p =
          std::clamp((t - onset[k]) / duration[k], 0.0, 1.0);
      v += p * (lambda[k + 1] - lambda[k]);
    }
    return v;
  }
};

inline double lambda_t(const InterventionParams& iv, double t) {
  return iv.at(t);
}

}  // namespace epiflow

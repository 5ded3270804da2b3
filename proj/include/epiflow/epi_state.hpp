#pragma once

#include <array>

namespace epiflow {

// Instantaneous compartment populations. n is the constant total.
struct EpiState {
  double s = 0.0;
  double e = 0.0;
  double c = 0.0;
  double i = 0.0;
  double r = 0.0;
  double d = 0.0;
  double n = 0.0;

  std::array<double, 6> to_array() const { return {s, e, c, i, r, d}; }

  static EpiState from_array(const std::array<double, 6>& a, double n) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], n};
  }

  double compartment_sum() const { return s + e + c + i + r + d; }
};

}  // namespace epiflow

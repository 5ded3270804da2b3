#pragma once

#include <vector>

#include "epiflow/epi_state.hpp"
#include "epiflow/time_series.hpp"

namespace epiflow {

// Result of one forward simulation. ok == false marks a non-finite
// trajectory from an extreme parameter draw; callers resample instead of
// consuming the output.
struct SimOutput {
  bool ok = true;
  TimeSeries observed;
  std::vector<EpiState> latent;   // daily states, only when requested
  int latent_offset_days = 0;     // day index of latent[0] relative to the series start
  double clamp_mass = 0.0;        // total negative mass clamped during integration
};

}  // namespace epiflow

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epiflow/checkpoint.hpp"
#include "epiflow/networks.hpp"
#include "epiflow/priors.hpp"
#include "epiflow/rng.hpp"
#include "epiflow/time_series.hpp"

namespace epiflow {

struct PosteriorDraws {
  std::vector<std::string> names;
  std::vector<std::vector<double>> samples;  // natural space, one row per draw
  std::uint64_t config_hash = 0;
  std::uint64_t weight_hash = 0;
  std::uint64_t data_hash = 0;
  std::string timestamp;  // ISO-8601 UTC
};

std::uint64_t series_fingerprint(const TimeSeries& x);

// z ~ N(0, I) pushed through the inverse flow, conditioned on the summary of
// x_obs (computed once). Weights are read-only; draws land in natural space.
PosteriorDraws sample_posterior(const Estimator<float>& est,
                                const ParameterSpace& space,
                                const TimeSeries& x_obs, int m, Rng& rng);

// Convenience wrapper that rebuilds the estimator from a checkpoint.
PosteriorDraws sample_posterior(const Checkpoint& ckpt, const TimeSeries& x_obs,
                                int m, Rng& rng);

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double median = 0.0;
  double map = 0.0;
  double ci_lo = 0.0;  // 2.5% quantile
  double ci_hi = 0.0;  // 97.5% quantile
  double q25 = 0.0;
  double q75 = 0.0;
};

// Per-marginal summaries; MAP is the mode of a Gaussian KDE (Silverman
// bandwidth, 512-point grid over the sample range).
std::vector<ParamSummary> summarize_posterior(const PosteriorDraws& draws);

// Type-7 quantile of a sample (interpolated order statistic).
double quantile(std::vector<double> xs, double p);

}  // namespace epiflow

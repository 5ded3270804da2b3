#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "epiflow/inference.hpp"
#include "epiflow/training.hpp"

namespace epiflow {

// Draws m posterior samples (natural space) for one observed series.
using PosteriorSampler = std::function<std::vector<std::vector<double>>(
    const TimeSeries& x, int m, Rng& rng)>;

struct SbcResult {
  std::vector<std::string> names;
  int m_sbc = 0;
  std::vector<std::vector<int>> ranks;  // [param][n_sims], each in [0, m_sbc]
  std::vector<double> chi2;             // 10-bin uniformity statistic
  double chi2_threshold = 21.666;       // 99th percentile of chi^2(9)
  long long sim_failures = 0;
};

// rank = #{posterior draw < prior draw} per dimension, over n_sims scenarios.
SbcResult run_sbc_with(const PosteriorSampler& sampler,
                       const ParameterSpace& space, const SimulatorSpec& sim,
                       int n_sims, int m_sbc, Rng& rng);

SbcResult run_sbc(const Estimator<float>& est, const ParameterSpace& space,
                  const SimulatorSpec& sim, int n_sims, int m_sbc, Rng& rng);

struct ForecastEnvelope {
  std::vector<std::string> channels;
  int t_obs = 0;    // re-simulated training window length
  int horizon = 0;  // additional forecast days
  std::array<double, 5> levels{0.025, 0.25, 0.5, 0.75, 0.975};
  // [channel][day][level], day spans t_obs + horizon
  std::vector<std::vector<std::array<double, 5>>> quantiles;
  long long divergent = 0;
  long long total = 0;
  bool misspecification_warning = false;  // > 20% divergent re-simulations
};

// Re-simulates the window plus horizon under each posterior draw; divergent
// runs (non-finite values or counts above 10x population) are dropped.
ForecastEnvelope posterior_predictive(const PosteriorDraws& draws,
                                      const SimulatorSpec& sim, int horizon,
                                      Rng& rng);

struct DummyCheckResult {
  int dummy_dims = 0;
  int n_test = 0;
  std::vector<double> ks;  // per dummy, KS distance to Uniform(0,1), averaged
};

DummyCheckResult dummy_posterior_check(const Estimator<float>& est,
                                       const ParameterSpace& space,
                                       const SimulatorSpec& sim, int n_test,
                                       int m, Rng& rng);

// Kolmogorov-Smirnov distance between a sample and Uniform(0,1).
double ks_uniform01(std::vector<double> xs);

// Delimited-text writers. Every file starts with a '#' metadata comment block
// (checkpoint id, data hash, seed) followed by a header row.
struct OutputMeta {
  std::uint64_t config_hash = 0;
  std::uint64_t weight_hash = 0;
  std::uint64_t data_hash = 0;
  std::uint64_t seed = 0;
  std::string timestamp;
};

void write_draws_csv(const std::string& path, const PosteriorDraws& draws,
                     const OutputMeta& meta);
void write_summary_csv(const std::string& path,
                       const std::vector<ParamSummary>& summary,
                       const OutputMeta& meta);
void write_ranks_csv(const std::string& path, const SbcResult& sbc,
                     const OutputMeta& meta);
void write_forecast_csv(const std::string& path, const ForecastEnvelope& env,
                        std::int64_t start_day, const OutputMeta& meta);

}  // namespace epiflow

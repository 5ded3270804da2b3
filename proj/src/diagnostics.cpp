#include "epiflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "epiflow/dates.hpp"

namespace epiflow {

namespace {

// One prior draw with an accepted simulation; failures resampled and counted.
SimOutput draw_scenario(const ParameterSpace& space, const SimulatorSpec& sim,
                        Rng& rng, long long& failures,
                        std::vector<double>& theta_out) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    theta_out = space.sample_prior(rng);
    SimOutput out = sim.simulate(theta_out, rng);
    if (out.ok) return out;
    ++failures;
  }
  throw std::runtime_error("scenario simulation keeps failing; check priors");
}

double chi2_uniformity(const std::vector<int>& ranks, int m_sbc) {
  constexpr int kBins = 10;
  const int n_values = m_sbc + 1;
  std::array<long long, kBins> obs{};
  std::array<int, kBins> support{};
  for (int r = 0; r < n_values; ++r) ++support[static_cast<std::size_t>(
      static_cast<long long>(r) * kBins / n_values)];
  for (int r : ranks) {
    const auto bin = static_cast<std::size_t>(
        static_cast<long long>(r) * kBins / n_values);
    ++obs[bin];
  }
  const double n = static_cast<double>(ranks.size());
  double chi2 = 0.0;
  for (int k = 0; k < kBins; ++k) {
    const double expected = n * support[k] / static_cast<double>(n_values);
    const double diff = static_cast<double>(obs[k]) - expected;
    chi2 += diff * diff / expected;
  }
  return chi2;
}

}  // namespace

SbcResult run_sbc_with(const PosteriorSampler& sampler,
                       const ParameterSpace& space, const SimulatorSpec& sim,
                       int n_sims, int m_sbc, Rng& rng) {
  if (n_sims < 100) throw std::invalid_argument("run_sbc: n_sims must be >= 100");
  if (m_sbc < 50) throw std::invalid_argument("run_sbc: m_sbc must be >= 50");

  SbcResult res;
  for (const auto& s : space.specs) res.names.push_back(s.name);
  res.m_sbc = m_sbc;
  const std::size_t p = space.specs.size();
  res.ranks.assign(p, {});
  for (auto& r : res.ranks) r.reserve(static_cast<std::size_t>(n_sims));

  std::vector<double> theta;
  for (int s = 0; s < n_sims; ++s) {
    SimOutput out = draw_scenario(space, sim, rng, res.sim_failures, theta);
    const auto draws = sampler(out.observed, m_sbc, rng);
    if (static_cast<int>(draws.size()) != m_sbc) {
      throw std::runtime_error("run_sbc: sampler returned wrong draw count");
    }
    for (std::size_t j = 0; j < p; ++j) {
      int rank = 0;
      for (const auto& d : draws) rank += d[j] < theta[j] ? 1 : 0;
      res.ranks[j].push_back(rank);
    }
  }
  res.chi2.resize(p);
  for (std::size_t j = 0; j < p; ++j) res.chi2[j] = chi2_uniformity(res.ranks[j], m_sbc);
  return res;
}

SbcResult run_sbc(const Estimator<float>& est, const ParameterSpace& space,
                  const SimulatorSpec& sim, int n_sims, int m_sbc, Rng& rng) {
  PosteriorSampler sampler = [&](const TimeSeries& x, int m, Rng& r) {
    return sample_posterior(est, space, x, m, r).samples;
  };
  return run_sbc_with(sampler, space, sim, n_sims, m_sbc, rng);
}

ForecastEnvelope posterior_predictive(const PosteriorDraws& draws,
                                      const SimulatorSpec& sim, int horizon,
                                      Rng& rng) {
  if (draws.samples.empty()) {
    throw std::invalid_argument("posterior_predictive: no draws");
  }
  if (horizon < 0) throw std::invalid_argument("posterior_predictive: horizon < 0");

  SimulatorSpec extended = sim;
  double population = 0.0;
  if (sim.model == SimulatorSpec::Model::kSir) {
    extended.sir.t_days += horizon;
    population = sim.sir.population;
  } else {
    extended.seir.t_days += horizon;
    population = sim.seir.population;
  }

  ForecastEnvelope env;
  env.channels = sim.channels();
  env.t_obs = sim.t_days();
  env.horizon = horizon;
  const int n_ch = static_cast<int>(env.channels.size());
  const int n_days = env.t_obs + horizon;
  const double limit = 10.0 * population;

  // values[c][day] over kept re-simulations
  std::vector<std::vector<std::vector<double>>> values(
      n_ch, std::vector<std::vector<double>>(static_cast<std::size_t>(n_days)));
  for (const auto& theta : draws.samples) {
    ++env.total;
    SimOutput out = extended.simulate(theta, rng);
    bool ok = out.ok;
    if (ok) {
      for (double v : out.observed.values) {
        if (!std::isfinite(v) || v > limit) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      ++env.divergent;
      continue;
    }
    for (int c = 0; c < n_ch; ++c) {
      for (int d = 0; d < n_days; ++d) {
        values[c][static_cast<std::size_t>(d)].push_back(out.observed.at(d, c));
      }
    }
  }
  if (env.total == env.divergent) {
    throw std::runtime_error("posterior_predictive: every re-simulation diverged");
  }
  env.misspecification_warning = 5 * env.divergent > env.total;

  env.quantiles.assign(n_ch, std::vector<std::array<double, 5>>(
                                 static_cast<std::size_t>(n_days)));
  for (int c = 0; c < n_ch; ++c) {
    for (int d = 0; d < n_days; ++d) {
      for (std::size_t q = 0; q < env.levels.size(); ++q) {
        env.quantiles[c][static_cast<std::size_t>(d)][q] =
            quantile(values[c][static_cast<std::size_t>(d)], env.levels[q]);
      }
    }
  }
  return env;
}

double ks_uniform01(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("ks_uniform01: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double hi = (static_cast<double>(i) + 1.0) / n - xs[i];
    const double lo = xs[i] - static_cast<double>(i) / n;
    d = std::max({d, hi, lo});
  }
  return d;
}

DummyCheckResult dummy_posterior_check(const Estimator<float>& est,
                                       const ParameterSpace& space,
                                       const SimulatorSpec& sim, int n_test,
                                       int m, Rng& rng) {
  if (sim.dummy_dims < 1) {
    throw std::invalid_argument("dummy_posterior_check: no dummy dimensions");
  }
  if (n_test < 1) throw std::invalid_argument("dummy_posterior_check: n_test >= 1");

  DummyCheckResult res;
  res.dummy_dims = sim.dummy_dims;
  res.n_test = n_test;
  res.ks.assign(static_cast<std::size_t>(sim.dummy_dims), 0.0);
  const std::size_t p = space.specs.size();
  const std::size_t first = p - static_cast<std::size_t>(sim.dummy_dims);

  long long failures = 0;
  std::vector<double> theta;
  std::vector<double> col(static_cast<std::size_t>(m));
  for (int t = 0; t < n_test; ++t) {
    SimOutput out = draw_scenario(space, sim, rng, failures, theta);
    const auto draws = sample_posterior(est, space, out.observed, m, rng);
    for (int j = 0; j < sim.dummy_dims; ++j) {
      for (int i = 0; i < m; ++i) {
        col[static_cast<std::size_t>(i)] =
            draws.samples[static_cast<std::size_t>(i)][first + static_cast<std::size_t>(j)];
      }
      res.ks[static_cast<std::size_t>(j)] += ks_uniform01(col);
    }
  }
  for (auto& k : res.ks) k /= static_cast<double>(n_test);
  return res;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

// Timestamps live in the manifest, not here: numeric artifacts must be
// byte-identical across reruns with the same config and seed.
void write_meta(std::ofstream& f, const OutputMeta& meta) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "# checkpoint: %016llx\n# weights: %016llx\n# data: %016llx\n"
                "# seed: %llu\n",
                static_cast<unsigned long long>(meta.config_hash),
                static_cast<unsigned long long>(meta.weight_hash),
                static_cast<unsigned long long>(meta.data_hash),
                static_cast<unsigned long long>(meta.seed));
  f << buf;
  if (!meta.timestamp.empty()) f << "# created: " << meta.timestamp << "\n";
}

}  // namespace

void write_draws_csv(const std::string& path, const PosteriorDraws& draws,
                     const OutputMeta& meta) {
  auto f = open_out(path);
  write_meta(f, meta);
  for (std::size_t j = 0; j < draws.names.size(); ++j) {
    f << (j ? "," : "") << draws.names[j];
  }
  f << "\n";
  char num[40];
  for (const auto& row : draws.samples) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(num, sizeof(num), "%.10g", row[j]);
      f << (j ? "," : "") << num;
    }
    f << "\n";
  }
}

void write_summary_csv(const std::string& path,
                       const std::vector<ParamSummary>& summary,
                       const OutputMeta& meta) {
  auto f = open_out(path);
  write_meta(f, meta);
  f << "param,mean,median,map,ci_lo,ci_hi,q25,q75\n";
  char buf[320];
  for (const auto& s : summary) {
    std::snprintf(buf, sizeof(buf), "%s,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                  s.name.c_str(), s.mean, s.median, s.map, s.ci_lo, s.ci_hi,
                  s.q25, s.q75);
    f << buf;
  }
}

void write_ranks_csv(const std::string& path, const SbcResult& sbc,
                     const OutputMeta& meta) {
  auto f = open_out(path);
  write_meta(f, meta);
  f << "# m_sbc: " << sbc.m_sbc << "\n";
  f << "# chi2_threshold: " << sbc.chi2_threshold << "\n";
  for (std::size_t j = 0; j < sbc.names.size(); ++j) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "# chi2 %s: %.4f\n", sbc.names[j].c_str(),
                  sbc.chi2[j]);
    f << buf;
  }
  f << "scenario";
  for (const auto& n : sbc.names) f << "," << n;
  f << "\n";
  const std::size_t n_sims = sbc.ranks.empty() ? 0 : sbc.ranks[0].size();
  for (std::size_t s = 0; s < n_sims; ++s) {
    f << s;
    for (std::size_t j = 0; j < sbc.names.size(); ++j) f << "," << sbc.ranks[j][s];
    f << "\n";
  }
}

void write_forecast_csv(const std::string& path, const ForecastEnvelope& env,
                        std::int64_t start_day, const OutputMeta& meta) {
  auto f = open_out(path);
  write_meta(f, meta);
  f << "# t_obs: " << env.t_obs << ", horizon: " << env.horizon
    << ", divergent: " << env.divergent << "/" << env.total << "\n";
  if (env.misspecification_warning) {
    f << "# warning: more than 20% of re-simulations diverged\n";
  }
  f << "day,date,channel,q025,q25,q50,q75,q975\n";
  const int n_days = env.t_obs + env.horizon;
  char buf[256];
  for (int d = 0; d < n_days; ++d) {
    const std::string date =
        start_day != 0 ? day_to_iso(start_day + d) : std::string("-");
    for (std::size_t c = 0; c < env.channels.size(); ++c) {
      const auto& q = env.quantiles[c][static_cast<std::size_t>(d)];
      std::snprintf(buf, sizeof(buf), "%d,%s,%s,%.6g,%.6g,%.6g,%.6g,%.6g\n", d,
                    date.c_str(), env.channels[c].c_str(), q[0], q[1], q[2],
                    q[3], q[4]);
      f << buf;
    }
  }
}

}  // namespace epiflow

#include "epiflow/inference.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <stdexcept>

namespace epiflow {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n,
                    std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::uint64_t series_fingerprint(const TimeSeries& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& c : x.channels) h = fnv1a(c.data(), c.size(), h);
  h = fnv1a(x.values.data(), x.values.size() * sizeof(double), h);
  h = fnv1a(&x.start_day, sizeof(x.start_day), h);
  return h;
}

PosteriorDraws sample_posterior(const Estimator<float>& est,
                                const ParameterSpace& space,
                                const TimeSeries& x_obs, int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sample_posterior: m must be >= 1");
  const auto& cfg = est.config();
  if (x_obs.cols() != cfg.channels) {
    throw std::invalid_argument(
        "sample_posterior: series has " + std::to_string(x_obs.cols()) +
        " channels, network expects " + std::to_string(cfg.channels));
  }
  if (space.size() != cfg.param_dim) {
    throw std::invalid_argument("sample_posterior: space/network dim mismatch");
  }
  const int t_len = x_obs.rows();
  const int p = cfg.param_dim;

  // Summary once on the single observed series.
  Tape<float> tape;
  const auto w = est.bind(tape, false);
  Tensor<float> x = prepare_series_batch<float>({x_obs.values}, t_len,
                                                cfg.channels, cfg.log1p_input);
  const auto cond1 = est.summary(tape, w, tape.leaf(std::move(x), false));
  const auto& cvec = tape.value(cond1);
  const int h = cvec.dim(1);

  // Tile the condition across all m draws and invert in one pass.
  Tensor<float> cond = Tensor<float>::zeros({m, h});
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < h; ++j) cond.at(i, j) = cvec.at(0, j);
  }
  Tensor<float> z = Tensor<float>::zeros({m, p});
  for (auto& v : z.data) v = static_cast<float>(rng.normal());
  const auto theta_u = est.flow_inverse(tape, w, tape.leaf(std::move(z), false),
                                        tape.leaf(std::move(cond), false));
  const auto& u = tape.value(theta_u);

  PosteriorDraws out;
  out.names.reserve(space.specs.size());
  for (const auto& s : space.specs) out.names.push_back(s.name);
  out.samples.reserve(static_cast<std::size_t>(m));
  std::vector<double> row(static_cast<std::size_t>(p));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < p; ++j) {
      const double v = static_cast<double>(u.at(i, j));
      if (!std::isfinite(v)) {
        throw std::runtime_error(
            "sample_posterior: non-finite inverse output (divergent flow?)");
      }
      row[static_cast<std::size_t>(j)] = v;
    }
    out.samples.push_back(space.to_natural(row));
  }
  out.weight_hash = 0;  // filled by callers that track checkpoints
  out.data_hash = series_fingerprint(x_obs);
  out.timestamp = utc_now();
  return out;
}

PosteriorDraws sample_posterior(const Checkpoint& ckpt, const TimeSeries& x_obs,
                                int m, Rng& rng) {
  Estimator<float> est = build_estimator(ckpt);
  PosteriorDraws d = sample_posterior(est, ckpt.space, x_obs, m, rng);
  d.config_hash = ckpt.config_hash;
  d.weight_hash = weight_fingerprint(est);
  return d;
}

double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double idx = p * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(idx);
  if (lo + 1 >= xs.size()) return xs.back();
  const double w = idx - static_cast<double>(lo);
  return (1.0 - w) * xs[lo] + w * xs[lo + 1];
}

namespace {

double kde_map(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n > 1 ? n - 1 : 1);
  const double sd = std::sqrt(var);
  const double iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0.0) spread = sd;
  if (spread <= 0.0) return xs[0];  // point mass
  const double bw =
      0.9 * spread * std::pow(static_cast<double>(n), -0.2);

  const auto [mn_it, mx_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *mn_it, hi = *mx_it;
  constexpr int kGrid = 512;
  double best_x = lo, best_d = -1.0;
  for (int g = 0; g < kGrid; ++g) {
    const double x = lo + (hi - lo) * g / (kGrid - 1);
    double d = 0.0;
    for (double xi : xs) {
      const double t = (x - xi) / bw;
      d += std::exp(-0.5 * t * t);
    }
    if (d > best_d) {
      best_d = d;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace

std::vector<ParamSummary> summarize_posterior(const PosteriorDraws& draws) {
  if (draws.samples.size() < 100) {
    throw std::invalid_argument("summarize_posterior: need at least 100 draws");
  }
  const std::size_t p = draws.names.size();
  std::vector<ParamSummary> out(p);
  std::vector<double> col(draws.samples.size());
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < draws.samples.size(); ++i) col[i] = draws.samples[i][j];
    auto& s = out[j];
    s.name = draws.names[j];
    double mean = 0.0;
    for (double x : col) mean += x;
    s.mean = mean / static_cast<double>(col.size());
    s.median = quantile(col, 0.5);
    s.ci_lo = quantile(col, 0.025);
    s.ci_hi = quantile(col, 0.975);
    s.q25 = quantile(col, 0.25);
    s.q75 = quantile(col, 0.75);
    s.map = kde_map(col);
  }
  return out;
}

}  // namespace epiflow

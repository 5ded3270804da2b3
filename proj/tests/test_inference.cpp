#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "epiflow/checkpoint.hpp"
#include "epiflow/inference.hpp"
#include "epiflow/training.hpp"

using namespace epiflow;

namespace {

struct Setup {
  SimulatorSpec sim;
  ParameterSpace space;
  Estimator<float> est;

  Setup() : sim(make_sim()), space(make_parameter_space(sim)), est(make_net()) {}

  static SimulatorSpec make_sim() {
    SimulatorSpec s;
    s.model = SimulatorSpec::Model::kSir;
    s.sir.t_days = 10;
    return s;
  }

  static NetworkConfig make_net() {
    NetworkConfig net;
    net.param_dim = 5;
    net.channels = 1;
    net.filter_blocks = 1;
    net.kernel_widths = {3};
    net.filters_per_width = 4;
    net.summary_dim = 8;
    net.flow_blocks = 3;
    net.coupling_hidden = 16;
    net.coupling_layers = 1;
    net.init_seed = 3;
    return net;
  }

  TimeSeries observed() const {
    TimeSeries x = TimeSeries::zeros({"new_infected"}, sim.sir.t_days);
    for (int k = 0; k < x.rows(); ++k) x.at(k, 0) = 3.0 * k + 1.0;
    return x;
  }
};

PosteriorDraws gaussian_draws(double mu, double sd, int n, std::uint64_t seed) {
  PosteriorDraws d;
  d.names = {"w"};
  Rng rng(seed);
  for (int i = 0; i < n; ++i) d.samples.push_back({mu + sd * rng.normal()});
  return d;
}

}  // namespace

TEST_SUITE("inference") {

TEST_CASE("type-7 quantiles interpolate order statistics") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  CHECK(quantile(xs, 0.0) == doctest::Approx(1.0));
  CHECK(quantile(xs, 1.0) == doctest::Approx(4.0));
  CHECK(quantile(xs, 0.5) == doctest::Approx(2.5));
  CHECK(quantile(xs, 0.25) == doctest::Approx(1.75));
  CHECK(quantile(xs, 0.975) == doctest::Approx(3.925));
  CHECK(quantile({7.0}, 0.31) == doctest::Approx(7.0));
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == doctest::Approx(2.0));  // unsorted in
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("posterior draws are deterministic, finite and in-support") {
  Setup s;
  const auto x = s.observed();
  Rng r1(17), r2(17), r3(18);
  const auto a = sample_posterior(s.est, s.space, x, 256, r1);
  const auto b = sample_posterior(s.est, s.space, x, 256, r2);
  const auto c = sample_posterior(s.est, s.space, x, 256, r3);

  REQUIRE(a.samples.size() == 256);
  CHECK(a.names == std::vector<std::string>{"lambda", "mu", "lag", "psi", "i0"});
  for (const auto& row : a.samples) {
    REQUIRE(row.size() == 5);
    for (double v : row) {
      CHECK(std::isfinite(v));
      CHECK(v > 0.0);  // every sir parameter lives on the positive axis
    }
  }
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
  CHECK(a.data_hash == series_fingerprint(x));
}

TEST_CASE("sampling leaves the weights untouched") {
  Setup s;
  const auto before = weight_fingerprint(s.est);
  Rng rng(21);
  sample_posterior(s.est, s.space, s.observed(), 512, rng);
  CHECK(weight_fingerprint(s.est) == before);
}

TEST_CASE("input validation names the mismatch") {
  Setup s;
  Rng rng(22);
  CHECK_THROWS_AS(sample_posterior(s.est, s.space, s.observed(), 0, rng),
                  std::invalid_argument);

  TimeSeries wrong = TimeSeries::zeros({"new_infected", "new_dead"}, 10);
  CHECK_THROWS_WITH_AS(sample_posterior(s.est, s.space, wrong, 10, rng),
                       doctest::Contains("2 channels"), std::invalid_argument);

  auto space4 = s.space;
  space4.specs.pop_back();
  space4.mean.pop_back();
  space4.std_dev.pop_back();
  CHECK_THROWS_AS(sample_posterior(s.est, space4, s.observed(), 10, rng),
                  std::invalid_argument);
}

TEST_CASE("checkpoint wrapper stamps config and weight hashes") {
  Setup s;
  const auto ckpt = make_checkpoint(s.est, s.space, s.sim, 0, {}, 0);
  Rng rng(23);
  const auto d = sample_posterior(ckpt, s.observed(), 128, rng);
  CHECK(d.config_hash == ckpt.config_hash);
  CHECK(d.weight_hash == weight_fingerprint(s.est));
  CHECK(d.weight_hash != 0);
  CHECK(!d.timestamp.empty());

  // The wrapper and the direct call agree draw for draw.
  Rng rng2(23);
  const auto direct = sample_posterior(s.est, s.space, s.observed(), 128, rng2);
  CHECK(d.samples == direct.samples);
}

TEST_CASE("series fingerprint reacts to any field") {
  Setup s;
  const auto x = s.observed();
  const auto h = series_fingerprint(x);
  CHECK(series_fingerprint(x) == h);

  auto bumped = x;
  bumped.at(3, 0) += 1.0;
  CHECK(series_fingerprint(bumped) != h);

  auto renamed = x;
  renamed.channels[0] = "new_dead";
  CHECK(series_fingerprint(renamed) != h);

  auto shifted = x;
  shifted.start_day += 1;
  CHECK(series_fingerprint(shifted) != h);
}

TEST_CASE("summaries recover the moments of a gaussian sample") {
  const auto d = gaussian_draws(2.0, 0.5, 5000, 77);
  const auto s = summarize_posterior(d);
  REQUIRE(s.size() == 1);
  CHECK(s[0].name == "w");
  CHECK(s[0].mean == doctest::Approx(2.0).epsilon(0.02));
  CHECK(s[0].median == doctest::Approx(2.0).epsilon(0.02));
  CHECK(s[0].map == doctest::Approx(2.0).epsilon(0.06));
  CHECK(s[0].ci_lo == doctest::Approx(2.0 - 1.96 * 0.5).epsilon(0.05));
  CHECK(s[0].ci_hi == doctest::Approx(2.0 + 1.96 * 0.5).epsilon(0.05));
  CHECK(s[0].q25 == doctest::Approx(2.0 - 0.6745 * 0.5).epsilon(0.05));
  CHECK(s[0].q75 == doctest::Approx(2.0 + 0.6745 * 0.5).epsilon(0.05));
}

TEST_CASE("map finds the taller mode, not the mean") {
  PosteriorDraws d;
  d.names = {"w"};
  Rng rng(91);
  for (int i = 0; i < 6000; ++i) {
    const bool left = rng.uniform() < 0.7;
    d.samples.push_back({(left ? 0.0 : 3.0) + 0.3 * rng.normal()});
  }
  const auto s = summarize_posterior(d);
  CHECK(std::abs(s[0].map) < 0.2);       // dominant mode at zero
  CHECK(s[0].mean == doctest::Approx(0.9).epsilon(0.1));
}

TEST_CASE("summaries demand a real sample") {
  CHECK_THROWS_AS(summarize_posterior(gaussian_draws(0.0, 1.0, 99, 5)),
                  std::invalid_argument);
  CHECK_NOTHROW(summarize_posterior(gaussian_draws(0.0, 1.0, 100, 5)));
}

}  // TEST_SUITE

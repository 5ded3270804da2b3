#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "epiflow/priors.hpp"
#include "epiflow/rng.hpp"
#include "epiflow/seir_model.hpp"

using namespace epiflow;

namespace {

ParamSpec spec_of(const ParameterSpace& space, const std::string& name) {
  const int i = space.index_of(name);
  REQUIRE(i >= 0);
  return space.specs[i];
}

}  // namespace

TEST_SUITE("priors") {

TEST_CASE("transforms round trip on every support") {
  ParamSpec pos;
  pos.name = "p";
  for (double v : {1e-6, 0.37, 1.0, 250.0}) {
    CHECK(transform_inverse(pos, transform_forward(pos, v)) ==
          doctest::Approx(v).epsilon(1e-10));
  }

  ParamSpec unit;
  unit.name = "u";
  unit.support = Support::kUnitInterval;
  unit.family = PriorFamily::kUniform;
  unit.transform = Transform::kLogit;
  CHECK(transform_forward(unit, 0.5) == doctest::Approx(0.0));
  for (double v : {1e-4, 0.3, 0.9991}) {
    CHECK(transform_inverse(unit, transform_forward(unit, v)) ==
          doctest::Approx(v).epsilon(1e-10));
  }

  ParamSpec box;
  box.name = "b";
  box.support = Support::kBounded;
  box.lo = -3.2;
  box.hi = 3.2;
  box.family = PriorFamily::kUniform;
  box.transform = Transform::kScaledLogit;
  CHECK(transform_forward(box, 0.0) == doctest::Approx(0.0));
  for (double v : {-3.1, -0.4, 0.0, 2.9}) {
    CHECK(transform_inverse(box, transform_forward(box, v)) ==
          doctest::Approx(v).epsilon(1e-10));
  }

  ParamSpec line;
  line.name = "n";
  line.support = Support::kUnbounded;
  line.family = PriorFamily::kNormal;
  line.transform = Transform::kIdentity;
  for (double v : {-17.0, 0.0, 4.25}) {
    CHECK(transform_forward(line, v) == v);
    CHECK(transform_inverse(line, v) == v);
  }
}

TEST_CASE("out-of-support values name the offending parameter") {
  ParamSpec pos;
  pos.name = "e0";
  CHECK_THROWS_WITH_AS(transform_forward(pos, -1.0),
                       doctest::Contains("param 'e0'"), std::invalid_argument);
  ParamSpec unit;
  unit.name = "alpha";
  unit.support = Support::kUnitInterval;
  unit.family = PriorFamily::kUniform;
  unit.transform = Transform::kLogit;
  CHECK_THROWS_WITH_AS(transform_forward(unit, 1.0),
                       doctest::Contains("param 'alpha'"),
                       std::invalid_argument);
}

TEST_CASE("spec validation rejects inconsistent definitions") {
  ParamSpec bad;
  bad.name = "x";
  bad.support = Support::kBounded;
  bad.lo = 2.0;
  bad.hi = 2.0;  // empty interval
  bad.family = PriorFamily::kUniform;
  bad.transform = Transform::kScaledLogit;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  ParamSpec mismatched;
  mismatched.name = "y";
  mismatched.support = Support::kPositive;
  mismatched.family = PriorFamily::kLogNormal;
  mismatched.transform = Transform::kLogit;  // wrong bijection
  CHECK_THROWS_AS(mismatched.validate(), std::invalid_argument);

  CHECK_THROWS_AS(make_space({ParamSpec{.name = "z"}, ParamSpec{.name = "z"}}),
                  std::invalid_argument);
}

TEST_CASE("default sir priors") {
  const auto space = sir_parameter_space();
  REQUIRE(space.size() == 5);
  CHECK(spec_of(space, "lambda").a == doctest::Approx(0.4));
  CHECK(spec_of(space, "mu").a == doctest::Approx(0.125));
  CHECK(spec_of(space, "lag").a == doctest::Approx(8.0));
  CHECK(spec_of(space, "psi").a == doctest::Approx(5.0));
  CHECK(spec_of(space, "i0").a == doctest::Approx(20.0));
  for (const auto& s : space.specs) {
    CHECK(s.family == PriorFamily::kLogNormal);
    CHECK(s.b == doctest::Approx(0.5));
  }
}

TEST_CASE("default seir priors cover the full layout") {
  const auto names = seir_param_names(SeirOptions{});
  const auto space = seir_parameter_space(names);
  REQUIRE(space.size() == 34);
  for (int i = 0; i < space.size(); ++i) CHECK(space.specs[i].name == names[i]);

  CHECK(spec_of(space, "lambda0").a == doctest::Approx(3.0));
  CHECK(spec_of(space, "e0").a == doctest::Approx(10.0));
  CHECK(spec_of(space, "e0").b == doctest::Approx(2.0));
  CHECK(spec_of(space, "t1").family == PriorFamily::kNormal);
  CHECK(spec_of(space, "t1").a == doctest::Approx(7.0));
  CHECK(spec_of(space, "t1").b == doctest::Approx(3.0));
  CHECK(spec_of(space, "alpha").family == PriorFamily::kUniform);
  CHECK(spec_of(space, "alpha").support == Support::kUnitInterval);
  CHECK(spec_of(space, "delta").family == PriorFamily::kLogitNormal);
  const auto phase = spec_of(space, "phase_r");
  CHECK(phase.family == PriorFamily::kUniform);
  CHECK(phase.lo == doctest::Approx(-3.14159265).epsilon(1e-6));
  CHECK(phase.hi == doctest::Approx(3.14159265).epsilon(1e-6));
}

TEST_CASE("prior draws respect supports and keep onsets ordered") {
  const auto names = seir_param_names(SeirOptions{});
  const auto space = seir_parameter_space(names);
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const auto v = space.sample_prior(rng);
    for (int i = 0; i < space.size(); ++i) {
      const auto& s = space.specs[i];
      switch (s.support) {
        case Support::kPositive:
          CHECK(v[i] > 0.0);
          break;
        case Support::kUnitInterval:
          CHECK(v[i] > 0.0);
          CHECK(v[i] < 1.0);
          break;
        case Support::kBounded:
          CHECK(v[i] > s.lo);
          CHECK(v[i] < s.hi);
          break;
        case Support::kUnbounded:
          CHECK(std::isfinite(v[i]));
          break;
      }
    }
    // Positive gaps order the change points by construction.
    CHECK(v[space.index_of("t2_gap")] > 0.0);
    CHECK(v[space.index_of("t3_gap")] > 0.0);
    CHECK(v[space.index_of("t4_gap")] > 0.0);
  }
}

TEST_CASE("prior sampling is seed-deterministic") {
  const auto space = sir_parameter_space();
  Rng a(5), b(5), c(6);
  const auto va = space.sample_prior(a);
  CHECK(va == space.sample_prior(b));
  CHECK(va != space.sample_prior(c));
}

TEST_CASE("standardization recovers the transformed prior moments") {
  // In log space a log-normal prior is exactly Normal(log median, log std).
  auto space = make_space({[] {
    ParamSpec s;
    s.name = "w";
    s.family = PriorFamily::kLogNormal;
    s.a = 2.5;
    s.b = 0.7;
    return s;
  }()});
  Rng rng(42);
  space = fit_standardization(std::move(space), 100000, rng);
  CHECK(space.mean[0] == doctest::Approx(std::log(2.5)).epsilon(0.01));
  CHECK(space.std_dev[0] == doctest::Approx(0.7).epsilon(0.01));

  // Standardized draws are ~N(0,1): round trip through the estimation space.
  Rng rng2(43);
  for (int rep = 0; rep < 50; ++rep) {
    const auto v = space.sample_prior(rng2);
    const auto u = space.to_unconstrained(v);
    const auto back = space.to_natural(u);
    CHECK(back[0] == doctest::Approx(v[0]).epsilon(1e-10));
  }
}

TEST_CASE("two standardization runs agree") {
  const auto names = seir_param_names(SeirOptions{});
  Rng r1(7), r2(8);
  const auto a = fit_standardization(seir_parameter_space(names), 20000, r1);
  const auto b = fit_standardization(seir_parameter_space(names), 20000, r2);
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.std_dev[i] == doctest::Approx(b.std_dev[i]).epsilon(0.05));
    CHECK(a.mean[i] ==
          doctest::Approx(b.mean[i]).epsilon(0.05).scale(a.std_dev[i]));
  }
}

TEST_CASE("fit_standardization rejects tiny sample sizes") {
  Rng rng(1);
  CHECK_THROWS_AS(fit_standardization(sir_parameter_space(), 10, rng),
                  std::invalid_argument);
}

TEST_CASE("unknown names are reported") {
  const auto space = sir_parameter_space();
  CHECK(space.index_of("lambda") == 0);
  CHECK(space.index_of("nope") == -1);
  CHECK_THROWS_AS(seir_parameter_space({"lambda0", "mystery"}),
                  std::invalid_argument);
}

}  // TEST_SUITE

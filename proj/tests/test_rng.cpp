#include <doctest.h>

#include <cmath>
#include <vector>

#include "epiflow/rng.hpp"

using epiflow::Rng;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <class F>
Moments sample_moments(F&& draw, int n) {
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = draw();
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  return {mean, sq / n - mean * mean};
}

}  // namespace

TEST_SUITE("rng") {

TEST_CASE("same seed reproduces the stream") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("split streams are deterministic and distinct") {
  Rng root(9);
  Rng a = root.split(1), a2 = root.split(1), b = root.split(2);
  bool differs = false;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    CHECK(va == a2.next_u64());
    if (va != b.next_u64()) differs = true;
  }
  CHECK(differs);
  // Splitting must not advance the parent.
  Rng root2(9);
  (void)root2.split(5);
  Rng root3(9);
  CHECK(root2.next_u64() == root3.next_u64());
}

TEST_CASE("nested splits differ from first-level splits") {
  Rng root(77);
  Rng a = root.split(1).split(2);
  Rng b = root.split(2).split(1);
  bool differs = false;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() != b.next_u64()) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("uniform moments") {
  Rng rng(4);
  const int n = 200000;
  const auto m = sample_moments([&] { return rng.uniform(); }, n);
  CHECK(m.mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(m.var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-2.0, 3.0);
    CHECK(v >= -2.0);
    CHECK(v < 3.0);
  }
}

TEST_CASE("normal moments") {
  Rng rng(5);
  const int n = 200000;
  const auto m = sample_moments([&] { return rng.normal(); }, n);
  // SE(mean) = 1/sqrt(n) ~ 0.0022; 4 SE bands.
  CHECK(std::abs(m.mean) < 0.009);
  CHECK(m.var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("exponential mean 1") {
  Rng rng(6);
  const auto m = sample_moments([&] { return rng.exponential(); }, 200000);
  CHECK(m.mean == doctest::Approx(1.0).epsilon(0.02));
  CHECK(m.var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("gamma moments, small and large shape") {
  Rng rng(7);
  const int n = 200000;
  for (const auto [shape, scale] : {std::pair{0.6, 1.5}, {3.7, 2.1}, {40.0, 0.5}}) {
    const auto m = sample_moments([&] { return rng.gamma(shape, scale); }, n);
    CHECK(m.mean == doctest::Approx(shape * scale).epsilon(0.02));
    CHECK(m.var == doctest::Approx(shape * scale * scale).epsilon(0.06));
  }
}

TEST_CASE("poisson moments across both algorithm branches") {
  Rng rng(8);
  const int n = 200000;
  for (const double mean : {0.7, 3.2, 45.0, 300.0}) {
    const auto m =
        sample_moments([&] { return static_cast<double>(rng.poisson(mean)); }, n);
    CHECK(m.mean == doctest::Approx(mean).epsilon(0.02));
    CHECK(m.var == doctest::Approx(mean).epsilon(0.05));
  }
  CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("student t4 symmetry and central mass") {
  Rng rng(9);
  const int n = 400000;
  long long inside = 0;
  double median_acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.student_t4();
    if (std::abs(v) <= 1.0) ++inside;
    median_acc += (v > 0.0) ? 1.0 : 0.0;
  }
  // P(|T| <= 1) for nu = 4; SE ~ 0.0008.
  CHECK(static_cast<double>(inside) / n == doctest::Approx(0.6260990337).epsilon(0.006));
  CHECK(median_acc / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("negative binomial mean and dispersion") {
  Rng rng(10);
  const int n = 200000;
  for (const auto [mean, psi] : {std::pair{10.0, 5.0}, {3.0, 0.8}, {50.0, 20.0}}) {
    const auto m = sample_moments(
        [&] { return static_cast<double>(rng.neg_binomial(mean, psi)); }, n);
    CHECK(m.mean == doctest::Approx(mean).epsilon(0.02));
    CHECK(m.var == doctest::Approx(mean + mean * mean / psi).epsilon(0.08));
  }
  CHECK_THROWS(rng.neg_binomial(std::numeric_limits<double>::infinity(), 1.0));
}

TEST_CASE("large dispersion collapses negative binomial to poisson") {
  Rng rng(11);
  const int n = 200000;
  const auto m = sample_moments(
      [&] { return static_cast<double>(rng.neg_binomial(8.0, 1e9)); }, n);
  CHECK(m.mean == doctest::Approx(8.0).epsilon(0.02));
  CHECK(m.var == doctest::Approx(8.0).epsilon(0.05));
}

}  // TEST_SUITE

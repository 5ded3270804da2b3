#pragma once

#include <array>
#include <cstdint>

namespace epiflow {

// Splittable pseudo-random generator (xoshiro256++ core, splitmix64 seeding).
// split(k) derives an independent substream from this generator's identity,
// not from its draw position, so parallel simulation tasks can each own a
// deterministic stream: rng.split(task_index).
//
// All distributions are sampled with hand-rolled algorithms so sequences are
// stable across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller; one spare value is cached.
  double normal();

  // Exponential with rate 1.
  double exponential();

  // Gamma(shape, scale), Marsaglia-Tsang.
  double gamma(double shape, double scale);

  // Poisson; Knuth below mean 30, transformed rejection (PTRS) above.
  long long poisson(double mean);

  // Student-t, 4 degrees of freedom, location 0, scale 1.
  double student_t4();

  // Mean/dispersion parameterization: Var = mean + mean^2 / dispersion.
  // Sampled as a gamma-Poisson mixture. Throws on non-finite input.
  long long neg_binomial(double mean, double dispersion);

  // Independent deterministic substream.
  Rng split(std::uint64_t stream) const;

 private:
  Rng() = default;
  void seed_from_tag(std::uint64_t tag);

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t tag_ = 0;  // identity used by split()
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace epiflow

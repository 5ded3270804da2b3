#pragma once

#include <span>
#include <string>
#include <vector>

#include "epiflow/rng.hpp"

namespace epiflow {

enum class Support { kPositive, kUnitInterval, kBounded, kUnbounded };
enum class Transform { kLog, kLogit, kScaledLogit, kIdentity };
enum class PriorFamily { kLogNormal, kNormal, kUniform, kLogitNormal };

// One model parameter: its support, prior, and the bijection onto the real
// line the estimator works in.
struct ParamSpec {
  std::string name;
  Support support = Support::kPositive;
  double lo = 0.0;  // bounds, used by kBounded (and kUnitInterval as 0/1)
  double hi = 1.0;
  PriorFamily family = PriorFamily::kLogNormal;
  // Family hyperparameters:
  //   kLogNormal  a = median (natural scale), b = log-space std
  //   kNormal     a = mean, b = std
  //   kUniform    over the declared support bounds; a, b unused
  //   kLogitNormal a = logit-space mean, b = logit-space std
  double a = 1.0;
  double b = 1.0;
  Transform transform = Transform::kLog;

  void validate() const;  // throws std::invalid_argument
};

// Transform to/from the unconstrained line, before standardization.
double transform_forward(const ParamSpec& spec, double v);
double transform_inverse(const ParamSpec& spec, double u);

struct ParameterSpace {
  std::vector<ParamSpec> specs;
  // Per-dimension statistics of the transformed prior; estimation space is
  // (transform(v) - mean) / std.
  std::vector<double> mean;
  std::vector<double> std_dev;

  int size() const { return static_cast<int>(specs.size()); }
  int index_of(const std::string& name) const;  // -1 when absent
  void validate() const;

  std::vector<double> sample_prior(Rng& rng) const;
  std::vector<double> to_unconstrained(std::span<const double> v) const;
  std::vector<double> to_natural(std::span<const double> u) const;
};

// Construct a space with unit standardization from specs.
ParameterSpace make_space(std::vector<ParamSpec> specs);

// Estimate per-dimension mean/std of the transformed prior by Monte Carlo.
ParameterSpace fit_standardization(ParameterSpace space, int n_draws, Rng& rng);

// Default priors. The SEIR set covers the full 34-parameter model; pass the
// model's parameter names to subset it for ablation variants.
ParameterSpace sir_parameter_space();
ParameterSpace seir_parameter_space(const std::vector<std::string>& names);

}  // namespace epiflow

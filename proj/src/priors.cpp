#include "epiflow/priors.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace epiflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& name, const std::string& msg) {
  throw std::invalid_argument("param '" + name + "': " + msg);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void ParamSpec::validate() const {
  if (name.empty()) throw std::invalid_argument("param with empty name");
  if (support == Support::kBounded && !(lo < hi)) {
    fail(name, "bounded support needs lo < hi");
  }
  switch (family) {
    case PriorFamily::kLogNormal:
      if (support != Support::kPositive) fail(name, "log-normal prior needs positive support");
      if (!(a > 0.0) || !(b > 0.0)) fail(name, "log-normal needs median > 0 and log-std > 0");
      break;
    case PriorFamily::kNormal:
      if (support != Support::kUnbounded) fail(name, "normal prior needs unbounded support");
      if (!(b > 0.0)) fail(name, "normal needs std > 0");
      break;
    case PriorFamily::kUniform:
      if (support != Support::kUnitInterval && support != Support::kBounded) {
        fail(name, "uniform prior needs an interval support");
      }
      break;
    case PriorFamily::kLogitNormal:
      if (support != Support::kUnitInterval) fail(name, "logit-normal prior needs unit-interval support");
      if (!(b > 0.0)) fail(name, "logit-normal needs std > 0");
      break;
  }
  const bool match =
      (transform == Transform::kLog && support == Support::kPositive) ||
      (transform == Transform::kLogit && support == Support::kUnitInterval) ||
      (transform == Transform::kScaledLogit && support == Support::kBounded) ||
      (transform == Transform::kIdentity && support == Support::kUnbounded);
  if (!match) fail(name, "transform does not match support");
}

double transform_forward(const ParamSpec& spec, double v) {
  switch (spec.transform) {
    case Transform::kLog:
      if (!(v > 0.0)) fail(spec.name, "value outside positive support");
      return std::log(v);
    case Transform::kLogit:
      if (!(v > 0.0 && v < 1.0)) fail(spec.name, "value outside (0,1)");
      return logit(v);
    case Transform::kScaledLogit:
      if (!(v > spec.lo && v < spec.hi)) fail(spec.name, "value outside bounds");
      return logit((v - spec.lo) / (spec.hi - spec.lo));
    case Transform::kIdentity:
      if (!std::isfinite(v)) fail(spec.name, "value not finite");
      return v;
  }
  fail(spec.name, "unknown transform");
}

double transform_inverse(const ParamSpec& spec, double u) {
  switch (spec.transform) {
    case Transform::kLog:
      return std::exp(u);
    case Transform::kLogit:
      return sigmoid(u);
    case Transform::kScaledLogit:
      return spec.lo + (spec.hi - spec.lo) * sigmoid(u);
    case Transform::kIdentity:
      return u;
  }
  fail(spec.name, "unknown transform");
}

int ParameterSpace::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i) {
    if (specs[i].name == name) return i;
  }
  return -1;
}

void ParameterSpace::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& spec : specs) {
    spec.validate();
    if (!seen.insert(spec.name).second) {
      throw std::invalid_argument("duplicate param name: " + spec.name);
    }
  }
  if (mean.size() != specs.size() || std_dev.size() != specs.size()) {
    throw std::invalid_argument("standardization size mismatch");
  }
  for (std::size_t i = 0; i < std_dev.size(); ++i) {
    if (!(std_dev[i] > 0.0)) fail(specs[i].name, "standardization std must be > 0");
  }
}

std::vector<double> ParameterSpace::sample_prior(Rng& rng) const {
  std::vector<double> v(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    switch (s.family) {
      case PriorFamily::kLogNormal:
        v[i] = std::exp(std::log(s.a) + s.b * rng.normal());
        break;
      case PriorFamily::kNormal:
        v[i] = s.a + s.b * rng.normal();
        break;
      case PriorFamily::kUniform: {
        const double lo = s.support == Support::kUnitInterval ? 0.0 : s.lo;
        const double hi = s.support == Support::kUnitInterval ? 1.0 : s.hi;
        v[i] = rng.uniform(lo, hi);
        break;
      }
      case PriorFamily::kLogitNormal:
        v[i] = sigmoid(s.a + s.b * rng.normal());
        break;
    }
  }
  return v;
}

std::vector<double> ParameterSpace::to_unconstrained(
    std::span<const double> v) const {
  if (v.size() < specs.size()) throw std::invalid_argument("to_unconstrained: vector too short");
  std::vector<double> u(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    u[i] = (transform_forward(specs[i], v[i]) - mean[i]) / std_dev[i];
  }
  return u;
}

std::vector<double> ParameterSpace::to_natural(std::span<const double> u) const {
  if (u.size() < specs.size()) throw std::invalid_argument("to_natural: vector too short");
  std::vector<double> v(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    v[i] = transform_inverse(specs[i], u[i] * std_dev[i] + mean[i]);
  }
  return v;
}

ParameterSpace make_space(std::vector<ParamSpec> specs) {
  ParameterSpace space;
  space.specs = std::move(specs);
  space.mean.assign(space.specs.size(), 0.0);
  space.std_dev.assign(space.specs.size(), 1.0);
  space.validate();
  return space;
}

ParameterSpace fit_standardization(ParameterSpace space, int n_draws, Rng& rng) {
  if (n_draws < 1000) throw std::invalid_argument("fit_standardization: n_draws must be >= 1000");
  const std::size_t p = space.specs.size();
  std::vector<double> sum(p, 0.0), sumsq(p, 0.0);
  for (int d = 0; d < n_draws; ++d) {
    const auto v = space.sample_prior(rng);
    for (std::size_t i = 0; i < p; ++i) {
      const double u = transform_forward(space.specs[i], v[i]);
      sum[i] += u;
      sumsq[i] += u * u;
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    const double m = sum[i] / n_draws;
    const double var = sumsq[i] / n_draws - m * m;
    space.mean[i] = m;
    space.std_dev[i] = std::sqrt(std::max(var, 1e-12));
  }
  return space;
}

namespace {

ParamSpec log_normal(std::string name, double median, double log_std) {
  ParamSpec s;
  s.name = std::move(name);
  s.support = Support::kPositive;
  s.family = PriorFamily::kLogNormal;
  s.a = median;
  s.b = log_std;
  s.transform = Transform::kLog;
  return s;
}

ParamSpec normal(std::string name, double mu, double sd) {
  ParamSpec s;
  s.name = std::move(name);
  s.support = Support::kUnbounded;
  s.family = PriorFamily::kNormal;
  s.a = mu;
  s.b = sd;
  s.transform = Transform::kIdentity;
  return s;
}

ParamSpec unit_uniform(std::string name) {
  ParamSpec s;
  s.name = std::move(name);
  s.support = Support::kUnitInterval;
  s.family = PriorFamily::kUniform;
  s.transform = Transform::kLogit;
  return s;
}

ParamSpec bounded_uniform(std::string name, double lo, double hi) {
  ParamSpec s;
  s.name = std::move(name);
  s.support = Support::kBounded;
  s.lo = lo;
  s.hi = hi;
  s.family = PriorFamily::kUniform;
  s.transform = Transform::kScaledLogit;
  return s;
}

ParamSpec logit_normal(std::string name, double mu, double sd) {
  ParamSpec s;
  s.name = std::move(name);
  s.support = Support::kUnitInterval;
  s.family = PriorFamily::kLogitNormal;
  s.a = mu;
  s.b = sd;
  s.transform = Transform::kLogit;
  return s;
}

}  // namespace

ParameterSpace sir_parameter_space() {
  return make_space({
      log_normal("lambda", 0.4, 0.5),
      log_normal("mu", 0.125, 0.5),
      log_normal("lag", 8.0, 0.5),
      log_normal("psi", 5.0, 0.5),
      log_normal("i0", 20.0, 0.5),
  });
}

ParameterSpace seir_parameter_space(const std::vector<std::string>& names) {
  std::unordered_map<std::string, ParamSpec> all;
  auto put = [&](ParamSpec s) { all.emplace(s.name, std::move(s)); };

  put(log_normal("lambda0", 3.0, 0.6));
  put(log_normal("lambda1", 0.3, 0.8));
  put(log_normal("lambda2", 0.3, 0.65));
  put(log_normal("lambda3", 0.09, 0.6));
  put(log_normal("lambda4", 0.1, 0.9));
  // Onsets anchored to the German intervention dates (day 0 = 2020-03-01):
  // March 8/16/23 and May 6. Positive gaps keep the onsets ordered.
  put(normal("t1", 7.0, 3.0));
  put(log_normal("t2_gap", 8.0, 0.375));
  put(log_normal("t3_gap", 7.0, 0.43));
  put(log_normal("t4_gap", 44.0, 0.07));
  put(log_normal("dt1", 3.0, 0.6));
  put(log_normal("dt2", 3.0, 0.6));
  put(log_normal("dt3", 3.0, 0.6));
  put(log_normal("dt4", 3.0, 0.6));
  put(log_normal("beta", 0.3, 0.6));
  put(log_normal("gamma", 0.2, 0.6));
  put(log_normal("eta", 0.3, 0.55));
  put(log_normal("mu", 0.1, 0.25));
  put(log_normal("theta_rec", 0.2, 0.65));
  put(log_normal("d_rate", 0.2, 0.8));
  put(unit_uniform("alpha"));
  put(logit_normal("delta", -3.18, 0.86));
  put(log_normal("e0", 10.0, 2.0));
  put(log_normal("lag_i", 6.0, 0.33));
  put(log_normal("lag_r", 10.0, 0.18));
  put(log_normal("lag_d", 10.0, 0.2));
  put(log_normal("sigma_i", 8.0, 0.28));
  put(log_normal("sigma_r", 10.0, 0.26));
  put(log_normal("sigma_d", 3.0, 0.26));
  put(unit_uniform("amp_i"));
  put(unit_uniform("amp_r"));
  put(unit_uniform("amp_d"));
  put(bounded_uniform("phase_i", -kPi, kPi));
  put(bounded_uniform("phase_r", -kPi, kPi));
  put(bounded_uniform("phase_d", -kPi, kPi));

  std::vector<ParamSpec> specs;
  specs.reserve(names.size());
  for (const auto& n : names) {
    auto it = all.find(n);
    if (it == all.end()) throw std::invalid_argument("no default prior for param: " + n);
    specs.push_back(it->second);
  }
  return make_space(std::move(specs));
}

}  // namespace epiflow

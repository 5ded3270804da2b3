#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiflow/tensor.hpp"

namespace epiflow {

template <typename Scalar>
struct Param {
  std::string name;
  Tensor<Scalar> value;
  Tensor<Scalar> grad;
  // Adam moments, kept in double so float training stays well conditioned.
  Tensor<double> m;
  Tensor<double> v;
};

template <typename Scalar>
struct ParamStore {
  std::vector<Param<Scalar>> params;

  int add(std::string name, Tensor<Scalar> init) {
    Param<Scalar> p;
    p.name = std::move(name);
    p.grad = Tensor<Scalar>::zeros(init.shape);
    p.m = Tensor<double>::zeros(init.shape);
    p.v = Tensor<double>::zeros(init.shape);
    p.value = std::move(init);
    params.push_back(std::move(p));
    return static_cast<int>(params.size() - 1);
  }

  int find(const std::string& name) const {
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }

  std::size_t weight_count() const {
    std::size_t n = 0;
    for (const auto& p : params) n += p.value.numel();
    return n;
  }

  void zero_grads() {
    for (auto& p : params) {
      for (auto& g : p.grad.data) g = Scalar(0);
    }
  }
};

// Thrown when gradients stay non-finite for longer than max_skips steps.
class OptimAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdamConfig {
  double lr0 = 5e-4;
  double lr_min = 1e-5;
  long long total_steps = 0;  // cosine decay horizon; 0 = constant lr
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 5.0;  // global gradient-norm clip; 0 = off
  int max_skips = 100;
};

template <typename Scalar>
class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

  struct StepInfo {
    double lr = 0.0;
    double grad_norm = 0.0;
    bool skipped = false;
  };

  long long steps_taken() const { return step_; }
  int skip_streak() const { return skip_streak_; }

  double lr_at(long long step) const {
    if (cfg_.total_steps <= 1) return cfg_.lr0;
    double progress = static_cast<double>(step - 1) /
                      static_cast<double>(cfg_.total_steps - 1);
    progress = std::min(std::max(progress, 0.0), 1.0);
    return cfg_.lr_min +
           0.5 * (cfg_.lr0 - cfg_.lr_min) * (1.0 + std::cos(3.14159265358979323846 * progress));
  }

  StepInfo step(ParamStore<Scalar>& store) {
    ++step_;
    StepInfo info;
    info.lr = lr_at(step_);

    double sq = 0.0;
    for (const auto& p : store.params) {
      for (Scalar g : p.grad.data) sq += static_cast<double>(g) * static_cast<double>(g);
    }
    info.grad_norm = std::sqrt(sq);
    if (!std::isfinite(info.grad_norm)) {
      info.skipped = true;
      if (++skip_streak_ > cfg_.max_skips) {
        throw OptimAbort("gradients non-finite for " + std::to_string(skip_streak_) +
                         " consecutive steps");
      }
      return info;
    }
    skip_streak_ = 0;

    double scale = 1.0;
    if (cfg_.clip_norm > 0.0 && info.grad_norm > cfg_.clip_norm) {
      scale = cfg_.clip_norm / info.grad_norm;
    }
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (auto& p : store.params) {
      for (std::size_t i = 0; i < p.value.data.size(); ++i) {
        const double g = static_cast<double>(p.grad.data[i]) * scale;
        double& m = p.m.data[i];
        double& v = p.v.data[i];
        m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
        v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
        const double update = info.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg_.eps);
        p.value.data[i] -= static_cast<Scalar>(update);
      }
    }
    return info;
  }

 private:
  AdamConfig cfg_;
  long long step_ = 0;
  int skip_streak_ = 0;
};

}  // namespace epiflow

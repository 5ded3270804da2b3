#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "epiflow/optimizer.hpp"
#include "epiflow/rng.hpp"
#include "epiflow/tape.hpp"
#include "epiflow/tensor.hpp"

namespace epiflow {

// Architecture of the three jointly trained sub-networks: a convolutional
// filter, a recurrent summarizer, and a conditional coupling flow. The filter
// and summarizer can each be switched off for ablation runs; the flow then
// conditions on time-averaged features instead.
struct NetworkConfig {
  int param_dim = 0;  // P, including any dummy dimensions
  int channels = 0;   // observed series channels C

  bool use_filter_net = true;
  int filter_blocks = 2;
  std::vector<int> kernel_widths = {1, 3, 5, 7};
  int filters_per_width = 8;

  bool use_summary_net = true;  // false: time-mean pooling of features
  int summary_dim = 64;         // LSTM hidden size H

  int flow_blocks = 6;
  int coupling_hidden = 128;
  int coupling_layers = 2;  // hidden layers per coupling subnet
  double scale_clamp = 1.9;

  bool log1p_input = true;
  std::uint64_t init_seed = 7;

  int filter_channels() const {
    return filters_per_width * static_cast<int>(kernel_widths.size());
  }
  // Width of the conditioning vector handed to the flow.
  int condition_dim() const {
    if (use_summary_net) return summary_dim;
    return use_filter_net ? filter_channels() : channels;
  }

  void validate() const {
    if (param_dim < 2) throw std::invalid_argument("param_dim must be >= 2");
    if (channels < 1) throw std::invalid_argument("channels must be >= 1");
    if (filter_blocks < 1 || filters_per_width < 1 || kernel_widths.empty()) {
      throw std::invalid_argument("bad filter config");
    }
    for (int k : kernel_widths) {
      if (k < 1 || k % 2 == 0) throw std::invalid_argument("kernel widths must be odd");
    }
    if (summary_dim < 1) throw std::invalid_argument("summary_dim must be >= 1");
    if (flow_blocks < 1 || coupling_hidden < 1 || coupling_layers < 1) {
      throw std::invalid_argument("bad flow config");
    }
    if (!(scale_clamp > 0)) throw std::invalid_argument("scale_clamp must be > 0");
  }
};

// log1p both compresses count scales and keeps zeros at zero.
template <typename Scalar>
Tensor<Scalar> prepare_series_batch(const std::vector<std::vector<double>>& rows,
                                    int t_len, int channels, bool log1p_input) {
  Tensor<Scalar> x = Tensor<Scalar>::zeros(
      {static_cast<int>(rows.size()), t_len, channels});
  for (std::size_t b = 0; b < rows.size(); ++b) {
    if (static_cast<int>(rows[b].size()) != t_len * channels) {
      throw std::invalid_argument("prepare_series_batch: ragged batch");
    }
    for (int i = 0; i < t_len * channels; ++i) {
      const double v = rows[b][static_cast<std::size_t>(i)];
      x.data[b * static_cast<std::size_t>(t_len) * channels + i] =
          static_cast<Scalar>(log1p_input ? std::log1p(std::max(v, -0.999)) : v);
    }
  }
  return x;
}

template <typename Scalar>
class Estimator {
 public:
  using Id = typename Tape<Scalar>::Id;

  explicit Estimator(NetworkConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    Rng rng(cfg_.init_seed);
    build_weights(rng);
    build_permutations(rng);
  }

  const NetworkConfig& config() const { return cfg_; }
  ParamStore<Scalar>& weights() { return store_; }
  const ParamStore<Scalar>& weights() const { return store_; }
  const std::vector<std::vector<int>>& permutations() const { return perms_; }

  // Leaf ids for every parameter, in store order.
  std::vector<Id> bind(Tape<Scalar>& tape, bool trainable) const {
    std::vector<Id> ids;
    ids.reserve(store_.params.size());
    for (const auto& p : store_.params) ids.push_back(tape.leaf(p.value, trainable));
    return ids;
  }

  // p.grad += leaf gradient after tape.backward().
  void accumulate_grads(const Tape<Scalar>& tape, const std::vector<Id>& ids) {
    for (std::size_t i = 0; i < store_.params.size(); ++i) {
      const auto& g = tape.grad(ids[i]);
      auto& dst = store_.params[i].grad.data;
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += g.data[j];
    }
  }

  // x [B,T,C] -> condition vector [B, condition_dim()].
  Id summary(Tape<Scalar>& tape, const std::vector<Id>& w, Id x) const {
    Id feat = x;
    if (cfg_.use_filter_net) {
      for (int blk = 0; blk < cfg_.filter_blocks; ++blk) {
        std::vector<Id> branches;
        branches.reserve(cfg_.kernel_widths.size());
        for (std::size_t ki = 0; ki < cfg_.kernel_widths.size(); ++ki) {
          Id conv = tape.conv1d_same(feat, w[ix_.filter_w[blk][ki]]);
          branches.push_back(tape.add_channel_bias(conv, w[ix_.filter_b[blk][ki]]));
        }
        feat = tape.elu(concat_channels(tape, branches));
      }
    }
    if (!cfg_.use_summary_net) return tape.mean_time(feat);

    const int b = tape.value(feat).dim(0);
    const int t_len = tape.value(feat).dim(1);
    const int h = cfg_.summary_dim;
    Id hs = tape.leaf(Tensor<Scalar>::zeros({b, h}), false);
    Id cs = tape.leaf(Tensor<Scalar>::zeros({b, h}), false);
    for (int t = 0; t < t_len; ++t) {
      Id xt = tape.slice_time(feat, t);
      auto step = lstm_cell(tape, xt, hs, cs, w[ix_.lstm_w], w[ix_.lstm_b], h);
      hs = step.h;
      cs = step.c;
    }
    return hs;
  }

  // theta [B,P] standardized-unconstrained -> (z [B,P], logdet [B,1]).
  std::pair<Id, Id> flow_forward(Tape<Scalar>& tape, const std::vector<Id>& w,
                                 Id theta, Id cond) const {
    const int b = tape.value(theta).dim(0);
    Id v = theta;
    Id logdet = tape.leaf(Tensor<Scalar>::zeros({b, 1}), false);
    for (int blk = 0; blk < cfg_.flow_blocks; ++blk) {
      if (blk > 0) v = tape.permute_cols(v, perms_[blk]);
      auto [keep, active, keep_first] = split_dims(blk);
      Id u_keep = tape.slice_cols(v, keep_first ? 0 : active, keep);
      Id u_act = tape.slice_cols(v, keep_first ? keep : 0, active);
      auto [s, t] = subnet(tape, w, blk, u_keep, cond, active);
      Id v_act = tape.add(tape.mul(u_act, tape.exp_(s)), t);
      logdet = tape.add(logdet, tape.sum_cols(s));
      v = keep_first ? tape.concat_cols({u_keep, v_act})
                     : tape.concat_cols({v_act, u_keep});
    }
    return {v, logdet};
  }

  // Exact algebraic inverse of flow_forward at the same condition.
  Id flow_inverse(Tape<Scalar>& tape, const std::vector<Id>& w, Id z,
                  Id cond) const {
    Id v = z;
    for (int blk = cfg_.flow_blocks - 1; blk >= 0; --blk) {
      auto [keep, active, keep_first] = split_dims(blk);
      Id u_keep = tape.slice_cols(v, keep_first ? 0 : active, keep);
      Id v_act = tape.slice_cols(v, keep_first ? keep : 0, active);
      auto [s, t] = subnet(tape, w, blk, u_keep, cond, active);
      check_scale_finite(tape.value(s));
      Id u_act = tape.mul(tape.sub(v_act, t), tape.exp_(tape.neg(s)));
      v = keep_first ? tape.concat_cols({u_keep, u_act})
                     : tape.concat_cols({u_act, u_keep});
      if (blk > 0) v = tape.permute_cols(v, inverse_perms_[blk]);
    }
    return v;
  }

  // Mean over the batch of 1/2 |z|^2 - logdet (Gaussian constant dropped).
  Id nll(Tape<Scalar>& tape, const std::vector<Id>& w, Id theta, Id x) const {
    Id cond = summary(tape, w, x);
    auto [z, logdet] = flow_forward(tape, w, theta, cond);
    Id half_sq = tape.scale(tape.sum_cols(tape.square(z)), Scalar(0.5));
    return tape.mean_all(tape.sub(half_sq, logdet));
  }

 private:
  struct WeightIndex {
    std::vector<std::vector<int>> filter_w;  // [block][width]
    std::vector<std::vector<int>> filter_b;
    int lstm_w = -1;
    int lstm_b = -1;
    // [block][layer] plus final projection per block
    std::vector<std::vector<int>> coup_w;
    std::vector<std::vector<int>> coup_b;
    std::vector<int> coup_out_w;
    std::vector<int> coup_out_b;
  };

  NetworkConfig cfg_;
  ParamStore<Scalar> store_;
  WeightIndex ix_;
  std::vector<std::vector<int>> perms_;
  std::vector<std::vector<int>> inverse_perms_;

  static Tensor<Scalar> random_init(Rng& rng, std::vector<int> shape, int fan_in) {
    Tensor<Scalar> t = Tensor<Scalar>::zeros(std::move(shape));
    const double sd = std::sqrt(1.0 / std::max(fan_in, 1));
    for (auto& v : t.data) v = static_cast<Scalar>(sd * rng.normal());
    return t;
  }

  void build_weights(Rng& rng) {
    if (cfg_.use_filter_net) {
      ix_.filter_w.resize(cfg_.filter_blocks);
      ix_.filter_b.resize(cfg_.filter_blocks);
      int in_ch = cfg_.channels;
      for (int blk = 0; blk < cfg_.filter_blocks; ++blk) {
        for (std::size_t ki = 0; ki < cfg_.kernel_widths.size(); ++ki) {
          const int k = cfg_.kernel_widths[ki];
          const std::string base =
              "filter.b" + std::to_string(blk) + ".k" + std::to_string(k);
          ix_.filter_w[blk].push_back(store_.add(
              base + ".w",
              random_init(rng, {k, in_ch, cfg_.filters_per_width}, k * in_ch)));
          ix_.filter_b[blk].push_back(store_.add(
              base + ".b", Tensor<Scalar>::zeros({cfg_.filters_per_width})));
        }
        in_ch = cfg_.filter_channels();
      }
    }
    if (cfg_.use_summary_net) {
      const int in_dim =
          cfg_.use_filter_net ? cfg_.filter_channels() : cfg_.channels;
      const int h = cfg_.summary_dim;
      ix_.lstm_w = store_.add(
          "lstm.w", random_init(rng, {in_dim + h, 4 * h}, in_dim + h));
      Tensor<Scalar> b = Tensor<Scalar>::zeros({4 * h});
      for (int j = h; j < 2 * h; ++j) b.data[j] = Scalar(1);  // forget bias
      ix_.lstm_b = store_.add("lstm.b", std::move(b));
    }
    const int cond = cfg_.condition_dim();
    ix_.coup_w.resize(cfg_.flow_blocks);
    ix_.coup_b.resize(cfg_.flow_blocks);
    for (int blk = 0; blk < cfg_.flow_blocks; ++blk) {
      auto [keep, active, keep_first] = split_dims(blk);
      (void)keep_first;
      int in_dim = keep + cond;
      const std::string base = "flow.b" + std::to_string(blk);
      for (int l = 0; l < cfg_.coupling_layers; ++l) {
        ix_.coup_w[blk].push_back(store_.add(
            base + ".l" + std::to_string(l) + ".w",
            random_init(rng, {in_dim, cfg_.coupling_hidden}, in_dim)));
        ix_.coup_b[blk].push_back(
            store_.add(base + ".l" + std::to_string(l) + ".b",
                       Tensor<Scalar>::zeros({cfg_.coupling_hidden})));
        in_dim = cfg_.coupling_hidden;
      }
      // Zero-initialized head: the flow starts as the identity map.
      ix_.coup_out_w.push_back(store_.add(
          base + ".out.w", Tensor<Scalar>::zeros({in_dim, 2 * active})));
      ix_.coup_out_b.push_back(
          store_.add(base + ".out.b", Tensor<Scalar>::zeros({2 * active})));
    }
  }

  void build_permutations(Rng& rng) {
    perms_.resize(cfg_.flow_blocks);
    inverse_perms_.resize(cfg_.flow_blocks);
    const int p = cfg_.param_dim;
    for (int blk = 1; blk < cfg_.flow_blocks; ++blk) {
      Rng sub = rng.split(1000 + static_cast<std::uint64_t>(blk));
      std::vector<int> perm(p);
      for (int i = 0; i < p; ++i) perm[i] = i;
      for (int i = p - 1; i > 0; --i) {
        const int j = static_cast<int>(sub.uniform(0.0, i + 1.0));
        std::swap(perm[i], perm[std::min(j, i)]);
      }
      std::vector<int> inv(p);
      for (int i = 0; i < p; ++i) inv[perm[i]] = i;
      perms_[blk] = std::move(perm);
      inverse_perms_[blk] = std::move(inv);
    }
  }

  // keep = dims passed through, active = dims transformed; alternate roles.
  std::tuple<int, int, bool> split_dims(int blk) const {
    const int n1 = (cfg_.param_dim + 1) / 2;
    const int n2 = cfg_.param_dim - n1;
    const bool keep_first = blk % 2 == 0;
    return keep_first ? std::tuple{n1, n2, true} : std::tuple{n2, n1, false};
  }

  std::pair<Id, Id> subnet(Tape<Scalar>& tape, const std::vector<Id>& w,
                           int blk, Id u_keep, Id cond, int active) const {
    Id h = tape.concat_cols({u_keep, cond});
    for (int l = 0; l < cfg_.coupling_layers; ++l) {
      h = tape.elu(tape.add_rowvec(tape.matmul(h, w[ix_.coup_w[blk][l]]),
                                   w[ix_.coup_b[blk][l]]));
    }
    Id out = tape.add_rowvec(tape.matmul(h, w[ix_.coup_out_w[blk]]),
                             w[ix_.coup_out_b[blk]]);
    Id s = tape.soft_clamp(tape.slice_cols(out, 0, active),
                           static_cast<Scalar>(cfg_.scale_clamp));
    Id t = tape.slice_cols(out, active, active);
    return {s, t};
  }

  // [B,T,Ci] branches -> [B,T,sum Ci].
  static Id concat_channels(Tape<Scalar>& tape, const std::vector<Id>& ids) {
    // Flatten to 2-D [B*T, Ci], reuse concat_cols, reshape back.
    // Shapes agree because all branches share B and T.
    std::vector<Id> flat;
    flat.reserve(ids.size());
    int b = 0, t = 0, total = 0;
    for (Id id : ids) {
      const auto& v = tape.value(id);
      b = v.dim(0);
      t = v.dim(1);
      total += v.dim(2);
      flat.push_back(tape.reshape(id, {b * t, v.dim(2)}));
    }
    Id cat = tape.concat_cols(flat);
    return tape.reshape(cat, {b, t, total});
  }

  static void check_scale_finite(const Tensor<Scalar>& s) {
    for (Scalar v : s.data) {
      if (!std::isfinite(static_cast<double>(v))) {
        throw std::runtime_error("flow_inverse: non-finite scale activation");
      }
    }
  }
};

}  // namespace epiflow

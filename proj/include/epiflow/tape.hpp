#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "epiflow/tensor.hpp"

namespace epiflow {

// Reverse-mode tape over dense tensors. Operations append nodes; backward()
// walks them in reverse. Nodes whose inputs all have requires_grad == false
// carry no closure, so inference-only passes pay nothing for gradients.
template <typename Scalar>
class Tape {
 public:
  using Id = int;

  struct Node {
    Tensor<Scalar> value;
    Tensor<Scalar> grad;  // allocated by backward()
    bool requires_grad = false;
    std::function<void(Tape&)> back;  // empty for leaves / untracked nodes
  };

  void clear() { nodes_.clear(); }
  int size() const { return static_cast<int>(nodes_.size()); }

  Id leaf(Tensor<Scalar> value, bool requires_grad) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
  }

  const Tensor<Scalar>& value(Id id) const { return nodes_[check(id)].value; }
  const Tensor<Scalar>& grad(Id id) const { return nodes_[check(id)].grad; }
  bool requires_grad(Id id) const { return nodes_[check(id)].requires_grad; }

  // ---- dense algebra ----

  Id matmul(Id a, Id b) {
    const auto& ta = val(a);
    const auto& tb = val(b);
    require(ta.ndim() == 2 && tb.ndim() == 2 && ta.dim(1) == tb.dim(0),
            "matmul", ta, tb);
    const int m = ta.dim(0), n = tb.dim(1);
    Tensor<Scalar> out = Tensor<Scalar>::zeros({m, n});
    mat(out).noalias() = cmat(ta) * cmat(tb);
    return emit(std::move(out), {a, b}, [a, b](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad;
      if (t.nodes_[a].requires_grad) {
        t.mat(t.nodes_[a].grad).noalias() +=
            t.cmat(g) * t.cmat(t.nodes_[b].value).transpose();
      }
      if (t.nodes_[b].requires_grad) {
        t.mat(t.nodes_[b].grad).noalias() +=
            t.cmat(t.nodes_[a].value).transpose() * t.cmat(g);
      }
    });
  }

  Id add(Id a, Id b) {
    const auto& ta = val(a);
    const auto& tb = val(b);
    require(ta.same_shape(tb), "add", ta, tb);
    Tensor<Scalar> out = ta;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += tb.data[i];
    return emit(std::move(out), {a, b}, [a, b](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      t.accumulate(a, [&](std::size_t i) { return g[i]; });
      t.accumulate(b, [&](std::size_t i) { return g[i]; });
    });
  }

  Id sub(Id a, Id b) {
    const auto& ta = val(a);
    const auto& tb = val(b);
    require(ta.same_shape(tb), "sub", ta, tb);
    Tensor<Scalar> out = ta;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= tb.data[i];
    return emit(std::move(out), {a, b}, [a, b](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      t.accumulate(a, [&](std::size_t i) { return g[i]; });
      t.accumulate(b, [&](std::size_t i) { return -g[i]; });
    });
  }

  Id mul(Id a, Id b) {
    const auto& ta = val(a);
    const auto& tb = val(b);
    require(ta.same_shape(tb), "mul", ta, tb);
    Tensor<Scalar> out = ta;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= tb.data[i];
    return emit(std::move(out), {a, b}, [a, b](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      const auto& va = t.nodes_[a].value.data;
      const auto& vb = t.nodes_[b].value.data;
      t.accumulate(a, [&](std::size_t i) { return g[i] * vb[i]; });
      t.accumulate(b, [&](std::size_t i) { return g[i] * va[i]; });
    });
  }

  // [m,n] + row vector [n] broadcast over rows.
  Id add_rowvec(Id a, Id v) {
    const auto& ta = val(a);
    const auto& tv = val(v);
    require(ta.ndim() == 2 && tv.ndim() == 1 && ta.dim(1) == tv.dim(0),
            "add_rowvec", ta, tv);
    Tensor<Scalar> out = ta;
    const int m = ta.dim(0), n = ta.dim(1);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < n; ++c) out.at(r, c) += tv.data[c];
    }
    return emit(std::move(out), {a, v}, [a, v, m, n](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad;
      t.accumulate(a, [&](std::size_t i) { return g.data[i]; });
      if (t.nodes_[v].requires_grad) {
        auto& gv = t.nodes_[v].grad.data;
        for (int r = 0; r < m; ++r) {
          for (int c = 0; c < n; ++c) gv[c] += g.at(r, c);
        }
      }
    });
  }

  Id scale(Id a, Scalar k) {
    Tensor<Scalar> out = val(a);
    for (auto& x : out.data) x *= k;
    return emit(std::move(out), {a}, [a, k](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      t.accumulate(a, [&](std::size_t i) { return k * g[i]; });
    });
  }

  Id add_scalar(Id a, Scalar k) {
    Tensor<Scalar> out = val(a);
    for (auto& x : out.data) x += k;
    return emit(std::move(out), {a}, [a](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      t.accumulate(a, [&](std::size_t i) { return g[i]; });
    });
  }

  Id neg(Id a) { return scale(a, Scalar(-1)); }

  // ---- elementwise nonlinearities ----

  Id elu(Id a) {
    Tensor<Scalar> out = val(a);
    for (auto& x : out.data) x = x > Scalar(0) ? x : std::expm1(x);
    return emit(std::move(out), {a}, [a](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      const auto& y = t.nodes_[t.out_id_].value.data;
      const auto& x = t.nodes_[a].value.data;
      t.accumulate(a, [&](std::size_t i) {
        return g[i] * (x[i] > Scalar(0) ? Scalar(1) : y[i] + Scalar(1));
      });
    });
  }

  Id tanh_(Id a) {
    Tensor<Scalar> out = val(a);
    for (auto& x : out.data) x = std::tanh(x);
    return emit(std::move(out), {a}, [a](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      const auto& y = t.nodes_[t.out_id_].value.data;
      t.accumulate(a, [&](std::size_t i) { return g[i] * (Scalar(1) - y[i] * y[i]); });
    });
  }

  Id sigmoid_(Id a) {
    Tensor<Scalar> out = val(a);
    for (auto& x : out.data) {
      x = x >= Scalar(0) ? Scalar(1) / (Scalar(1) + std::exp(-x))
                         : std::exp(x) / (Scalar(1) + std::exp(x));
    }
    return emit(std::move(out), {a}, [a](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      const auto& y = t.nodes_[t.out_id_].value.data;
      t.accumulate(a, [&](std::size_t i) { return g[i] * y[i] * (Scalar(1) - y[i]); });
    });
  }

  Id exp_(Id a) {
    Tensor<Scalar> out = val(a);
    for (auto& x : out.data) x = std::exp(x);
    return emit(std::move(out), {a}, [a](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      const auto& y = t.nodes_[t.out_id_].value.data;
      t.accumulate(a, [&](std::size_t i) { return g[i] * y[i]; });
    });
  }

  Id square(Id a) {
    Tensor<Scalar> out = val(a);
    for (auto& x : out.data) x = x * x;
    return emit(std::move(out), {a}, [a](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      const auto& x = t.nodes_[a].value.data;
      t.accumulate(a, [&](std::size_t i) { return g[i] * Scalar(2) * x[i]; });
    });
  }

  // y = c * tanh(x / c): identity near zero, saturates at +-c.
  Id soft_clamp(Id a, Scalar c) {
    Tensor<Scalar> out = val(a);
    for (auto& x : out.data) x = c * std::tanh(x / c);
    return emit(std::move(out), {a}, [a, c](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      const auto& y = t.nodes_[t.out_id_].value.data;
      t.accumulate(a, [&](std::size_t i) {
        const Scalar r = y[i] / c;
        return g[i] * (Scalar(1) - r * r);
      });
    });
  }

  // ---- shape ops (2-D unless noted) ----

  Id concat_cols(const std::vector<Id>& ids) {
    if (ids.empty()) throw std::invalid_argument("concat_cols: no inputs");
    const int m = val(ids[0]).dim(0);
    int total = 0;
    for (Id id : ids) {
      const auto& t = val(id);
      require(t.ndim() == 2 && t.dim(0) == m, "concat_cols", t, t);
      total += t.dim(1);
    }
    Tensor<Scalar> out = Tensor<Scalar>::zeros({m, total});
    int ofs = 0;
    for (Id id : ids) {
      const auto& t = val(id);
      const int n = t.dim(1);
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) out.at(r, ofs + c) = t.at(r, c);
      }
      ofs += n;
    }
    std::vector<Id> deps = ids;
    return emit(std::move(out), deps, [ids, m](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad;
      int ofs = 0;
      for (Id id : ids) {
        const int n = t.nodes_[id].value.dim(1);
        if (t.nodes_[id].requires_grad) {
          auto& gi = t.nodes_[id].grad;
          for (int r = 0; r < m; ++r) {
            for (int c = 0; c < n; ++c) gi.at(r, c) += g.at(r, ofs + c);
          }
        }
        ofs += n;
      }
    });
  }

  Id slice_cols(Id a, int lo, int n) {
    const auto& ta = val(a);
    require(ta.ndim() == 2 && lo >= 0 && n >= 1 && lo + n <= ta.dim(1),
            "slice_cols", ta, ta);
    const int m = ta.dim(0);
    Tensor<Scalar> out = Tensor<Scalar>::zeros({m, n});
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < n; ++c) out.at(r, c) = ta.at(r, lo + c);
    }
    return emit(std::move(out), {a}, [a, lo, n, m](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad;
      if (!t.nodes_[a].requires_grad) return;
      auto& ga = t.nodes_[a].grad;
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) ga.at(r, lo + c) += g.at(r, c);
      }
    });
  }

  // out[:, j] = a[:, perm[j]]; perm is a permutation of 0..n-1.
  Id permute_cols(Id a, const std::vector<int>& perm) {
    const auto& ta = val(a);
    require(ta.ndim() == 2 && static_cast<int>(perm.size()) == ta.dim(1),
            "permute_cols", ta, ta);
    const int m = ta.dim(0), n = ta.dim(1);
    Tensor<Scalar> out = Tensor<Scalar>::zeros({m, n});
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < n; ++c) out.at(r, c) = ta.at(r, perm[c]);
    }
    return emit(std::move(out), {a}, [a, perm, m, n](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad;
      if (!t.nodes_[a].requires_grad) return;
      auto& ga = t.nodes_[a].grad;
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) ga.at(r, perm[c]) += g.at(r, c);
      }
    });
  }

  // Same data, new shape (row-major contiguity makes this a relabeling).
  Id reshape(Id a, std::vector<int> shape) {
    const auto& ta = val(a);
    if (Tensor<Scalar>::count(shape) != ta.numel()) {
      throw std::invalid_argument("reshape: element count mismatch for " +
                                  ta.shape_str());
    }
    Tensor<Scalar> out;
    out.shape = std::move(shape);
    out.data = ta.data;
    return emit(std::move(out), {a}, [a](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad.data;
      t.accumulate(a, [&](std::size_t i) { return g[i]; });
    });
  }

  // [B,T,C] -> [B,C] at time index step.
  Id slice_time(Id x, int step) {
    const auto& tx = val(x);
    require(tx.ndim() == 3 && step >= 0 && step < tx.dim(1), "slice_time", tx, tx);
    const int b = tx.dim(0), tt = tx.dim(1), c = tx.dim(2);
    Tensor<Scalar> out = Tensor<Scalar>::zeros({b, c});
    for (int i = 0; i < b; ++i) {
      const std::size_t base = (static_cast<std::size_t>(i) * tt + step) * c;
      for (int j = 0; j < c; ++j) out.data[static_cast<std::size_t>(i) * c + j] = tx.data[base + j];
    }
    return emit(std::move(out), {x}, [x, step, b, tt, c](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad;
      if (!t.nodes_[x].requires_grad) return;
      auto& gx = t.nodes_[x].grad;
      for (int i = 0; i < b; ++i) {
        const std::size_t base = (static_cast<std::size_t>(i) * tt + step) * c;
        for (int j = 0; j < c; ++j) gx.data[base + j] += g.data[static_cast<std::size_t>(i) * c + j];
      }
    });
  }

  // [B,T,C] -> [B,C] mean over time.
  Id mean_time(Id x) {
    const auto& tx = val(x);
    require(tx.ndim() == 3, "mean_time", tx, tx);
    const int b = tx.dim(0), tt = tx.dim(1), c = tx.dim(2);
    Tensor<Scalar> out = Tensor<Scalar>::zeros({b, c});
    for (int i = 0; i < b; ++i) {
      for (int s = 0; s < tt; ++s) {
        const std::size_t base = (static_cast<std::size_t>(i) * tt + s) * c;
        for (int j = 0; j < c; ++j) out.data[static_cast<std::size_t>(i) * c + j] += tx.data[base + j];
      }
    }
    for (auto& v : out.data) v /= Scalar(tt);
    return emit(std::move(out), {x}, [x, b, tt, c](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad;
      if (!t.nodes_[x].requires_grad) return;
      auto& gx = t.nodes_[x].grad;
      const Scalar inv = Scalar(1) / Scalar(tt);
      for (int i = 0; i < b; ++i) {
        for (int s = 0; s < tt; ++s) {
          const std::size_t base = (static_cast<std::size_t>(i) * tt + s) * c;
          for (int j = 0; j < c; ++j) gx.data[base + j] += inv * g.data[static_cast<std::size_t>(i) * c + j];
        }
      }
    });
  }

  // [m,n] -> [m,1] row sums.
  Id sum_cols(Id a) {
    const auto& ta = val(a);
    require(ta.ndim() == 2, "sum_cols", ta, ta);
    const int m = ta.dim(0), n = ta.dim(1);
    Tensor<Scalar> out = Tensor<Scalar>::zeros({m, 1});
    for (int r = 0; r < m; ++r) {
      Scalar s = 0;
      for (int c = 0; c < n; ++c) s += ta.at(r, c);
      out.data[static_cast<std::size_t>(r)] = s;
    }
    return emit(std::move(out), {a}, [a, m, n](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad;
      if (!t.nodes_[a].requires_grad) return;
      auto& ga = t.nodes_[a].grad;
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) ga.at(r, c) += g.data[static_cast<std::size_t>(r)];
      }
    });
  }

  // -> [1] mean of all entries.
  Id mean_all(Id a) {
    const auto& ta = val(a);
    Tensor<Scalar> out = Tensor<Scalar>::zeros({1});
    Scalar s = 0;
    for (Scalar x : ta.data) s += x;
    const std::size_t n = ta.data.size();
    out.data[0] = s / Scalar(n);
    return emit(std::move(out), {a}, [a, n](Tape& t) {
      const Scalar g = t.nodes_[t.out_id_].grad.data[0] / Scalar(n);
      t.accumulate(a, [&](std::size_t) { return g; });
    });
  }

  // Cross-correlation with zero same-padding: x [B,T,C] * k [K,C,F] -> [B,T,F].
  // K must be odd. Lowered to one GEMM via an im2col buffer.
  Id conv1d_same(Id x, Id kern) {
    const auto& tx = val(x);
    const auto& tk = val(kern);
    require(tx.ndim() == 3 && tk.ndim() == 3 && tk.dim(1) == tx.dim(2) &&
                tk.dim(0) % 2 == 1,
            "conv1d_same", tx, tk);
    const int b = tx.dim(0), tt = tx.dim(1), c = tx.dim(2);
    const int k = tk.dim(0), f = tk.dim(2);
    const int pad = k / 2;
    Tensor<Scalar> col = Tensor<Scalar>::zeros({b * tt, k * c});
    for (int i = 0; i < b; ++i) {
      for (int s = 0; s < tt; ++s) {
        auto* row = &col.data[(static_cast<std::size_t>(i) * tt + s) * (k * c)];
        for (int dk = 0; dk < k; ++dk) {
          const int src = s + dk - pad;
          if (src < 0 || src >= tt) continue;
          const auto* from = &tx.data[(static_cast<std::size_t>(i) * tt + src) * c];
          for (int j = 0; j < c; ++j) row[dk * c + j] = from[j];
        }
      }
    }
    Tensor<Scalar> out = Tensor<Scalar>::zeros({b, tt, f});
    {
      Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
          mo(out.data.data(), b * tt, f);
      mo.noalias() = cmap(col, b * tt, k * c) * cmap(tk, k * c, f);
    }
    return emit(std::move(out), {x, kern},
                [x, kern, col = std::move(col), b, tt, c, k, f, pad](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad;
      if (t.nodes_[kern].requires_grad) {
        auto& gk = t.nodes_[kern].grad;
        t.map(gk, k * c, f).noalias() +=
            t.cmap(col, b * tt, k * c).transpose() * t.cmap(g, b * tt, f);
      }
      if (t.nodes_[x].requires_grad) {
        Tensor<Scalar> gcol = Tensor<Scalar>::zeros({b * tt, k * c});
        t.map(gcol, b * tt, k * c).noalias() =
            t.cmap(g, b * tt, f) * t.cmap(t.nodes_[kern].value, k * c, f).transpose();
        auto& gx = t.nodes_[x].grad;
        for (int i = 0; i < b; ++i) {
          for (int s = 0; s < tt; ++s) {
            const auto* row = &gcol.data[(static_cast<std::size_t>(i) * tt + s) * (k * c)];
            for (int dk = 0; dk < k; ++dk) {
              const int src = s + dk - pad;
              if (src < 0 || src >= tt) continue;
              auto* to = &gx.data[(static_cast<std::size_t>(i) * tt + src) * c];
              for (int j = 0; j < c; ++j) to[j] += row[dk * c + j];
            }
          }
        }
      }
    });
  }

  // [B,T,F] bias add over the trailing dim.
  Id add_channel_bias(Id x, Id bias) {
    const auto& tx = val(x);
    const auto& tb = val(bias);
    require(tx.ndim() == 3 && tb.ndim() == 1 && tb.dim(0) == tx.dim(2),
            "add_channel_bias", tx, tb);
    const int rows = tx.dim(0) * tx.dim(1), f = tx.dim(2);
    Tensor<Scalar> out = tx;
    for (int r = 0; r < rows; ++r) {
      for (int j = 0; j < f; ++j) out.data[static_cast<std::size_t>(r) * f + j] += tb.data[j];
    }
    return emit(std::move(out), {x, bias}, [x, bias, rows, f](Tape& t) {
      const auto& g = t.nodes_[t.out_id_].grad;
      t.accumulate(x, [&](std::size_t i) { return g.data[i]; });
      if (t.nodes_[bias].requires_grad) {
        auto& gb = t.nodes_[bias].grad.data;
        for (int r = 0; r < rows; ++r) {
          for (int j = 0; j < f; ++j) gb[j] += g.data[static_cast<std::size_t>(r) * f + j];
        }
      }
    });
  }

  void backward(Id loss) {
    const auto& l = val(loss);
    if (l.numel() != 1) throw std::invalid_argument("backward: loss must be scalar");
    for (auto& n : nodes_) {
      if (n.requires_grad) {
        n.grad = Tensor<Scalar>::zeros(n.value.shape);
      } else {
        n.grad = Tensor<Scalar>{};
      }
    }
    if (!nodes_[static_cast<std::size_t>(loss)].requires_grad) return;
    nodes_[static_cast<std::size_t>(loss)].grad.data[0] = Scalar(1);
    for (int id = loss; id >= 0; --id) {
      auto& n = nodes_[static_cast<std::size_t>(id)];
      if (n.requires_grad && n.back) {
        out_id_ = id;
        n.back(*this);
      }
    }
  }

 private:
  std::vector<Node> nodes_;
  Id out_id_ = 0;  // node whose closure is currently running

  std::size_t check(Id id) const {
    if (id < 0 || id >= static_cast<Id>(nodes_.size())) {
      throw std::out_of_range("tape id out of range");
    }
    return static_cast<std::size_t>(id);
  }

  const Tensor<Scalar>& val(Id id) const { return nodes_[check(id)].value; }

  static void require(bool ok, const char* op, const Tensor<Scalar>& a,
                      const Tensor<Scalar>& b) {
    if (!ok) {
      throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                  a.shape_str() + " vs " + b.shape_str());
    }
  }

  template <class Fn>
  Id emit(Tensor<Scalar> out, const std::vector<Id>& deps, Fn&& back) {
    bool track = false;
    for (Id d : deps) track = track || nodes_[check(d)].requires_grad;
    Node n;
    n.value = std::move(out);
    n.requires_grad = track;
    if (track) n.back = std::forward<Fn>(back);
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
  }

  // += fn(i) into a's grad when tracked.
  template <class Fn>
  void accumulate(Id a, Fn&& fn) {
    auto& n = nodes_[static_cast<std::size_t>(a)];
    if (!n.requires_grad) return;
    for (std::size_t i = 0; i < n.grad.data.size(); ++i) n.grad.data[i] += fn(i);
  }

  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  static Eigen::Map<Mat> mat(Tensor<Scalar>& t) {
    return {t.data.data(), t.dim(0), t.dim(1)};
  }
  static Eigen::Map<const Mat> cmat(const Tensor<Scalar>& t) {
    return {t.data.data(), t.dim(0), t.dim(1)};
  }
  static Eigen::Map<Mat> map(Tensor<Scalar>& t, int r, int c) {
    return {t.data.data(), r, c};
  }
  static Eigen::Map<const Mat> cmap(const Tensor<Scalar>& t, int r, int c) {
    return {t.data.data(), r, c};
  }
};

// One LSTM step from tape primitives. w: [in+H, 4H] fused gate weights in
// order (input, forget, candidate, output); b: [4H].
template <typename Scalar>
struct LstmStep {
  typename Tape<Scalar>::Id h;
  typename Tape<Scalar>::Id c;
};

template <typename Scalar>
LstmStep<Scalar> lstm_cell(Tape<Scalar>& tape, typename Tape<Scalar>::Id x,
                           typename Tape<Scalar>::Id h_prev,
                           typename Tape<Scalar>::Id c_prev,
                           typename Tape<Scalar>::Id w,
                           typename Tape<Scalar>::Id b, int hidden) {
  auto xh = tape.concat_cols({x, h_prev});
  auto gates = tape.add_rowvec(tape.matmul(xh, w), b);
  auto gi = tape.sigmoid_(tape.slice_cols(gates, 0, hidden));
  auto gf = tape.sigmoid_(tape.slice_cols(gates, hidden, hidden));
  auto gg = tape.tanh_(tape.slice_cols(gates, 2 * hidden, hidden));
  auto go = tape.sigmoid_(tape.slice_cols(gates, 3 * hidden, hidden));
  auto c = tape.add(tape.mul(gf, c_prev), tape.mul(gi, gg));
  auto h = tape.mul(go, tape.tanh_(c));
  return {h, c};
}

}  // namespace epiflow

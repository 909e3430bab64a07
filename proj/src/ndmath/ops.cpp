#include "samarl/ndmath/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "samarl/ndmath/kernels.hpp"

namespace samarl::nd {

namespace {

template <typename T>
using Node = detail::Node<T>;

template <typename T>
void require_rank(const Tensor<T>& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                         shape_string(t.shape()));
  }
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
}

template <typename T>
const kernels::KernelTable<T>& kern() {
  return kernels::active<T>();
}

// Elementwise unary op helper: forward f(x), backward dx += g * df(x, y).
template <typename T, typename F, typename D>
Tensor<T> unary(const Tensor<T>& x, std::string_view name, F f, D df) {
  std::vector<T> out(x.size());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return detail::make_result<T>(x.shape(), std::move(out), name, {x}, [df](Node<T>& self) {
    auto& src = *self.inputs[0];
    auto gx = src.grad_buffer();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += self.grad[i] * df(src.value[i], self.value[i]);
  });
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  if (a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: inner dimensions disagree for " + shape_string(a.shape()) + " * " +
                         shape_string(b.shape()));
  }
  const std::size_t m = a.dim(0), kk = a.dim(1), n = b.dim(1);
  std::vector<T> out(m * n);
  kern<T>().gemm_nn(m, n, kk, a.data().data(), b.data().data(), out.data(), false);
  return detail::make_result<T>({m, n}, std::move(out), "matmul", {a, b}, [m, n, kk](Node<T>& self) {
    auto& na = *self.inputs[0];
    auto& nb = *self.inputs[1];
    const auto& kt = kern<T>();
    if (na.requires_grad) kt.gemm_nt(m, kk, n, self.grad.data(), nb.value.data(), na.grad_buffer().data(), true);
    if (nb.requires_grad) kt.gemm_tn(kk, n, m, na.value.data(), self.grad.data(), nb.grad_buffer().data(), true);
  });
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias) {
  require_rank(x, 2, "linear");
  require_rank(w, 2, "linear");
  if (x.dim(1) != w.dim(0)) {
    throw DimensionError("linear: input " + shape_string(x.shape()) + " does not match weight " +
                         shape_string(w.shape()));
  }
  const std::size_t m = x.dim(0), kk = x.dim(1), n = w.dim(1);
  const bool has_bias = bias.defined() && bias.size() > 0;
  if (has_bias && bias.size() != n) {
    throw DimensionError("linear: bias " + shape_string(bias.shape()) + " does not match weight " +
                         shape_string(w.shape()));
  }
  std::vector<T> out(m * n);
  if (has_bias) {
    const auto bv = bias.data();
    for (std::size_t i = 0; i < m; ++i) std::copy(bv.begin(), bv.end(), out.begin() + i * n);
  }
  kern<T>().gemm_nn(m, n, kk, x.data().data(), w.data().data(), out.data(), has_bias);
  std::vector<Tensor<T>> inputs{x, w};
  if (has_bias) inputs.push_back(bias);
  return detail::make_result<T>({m, n}, std::move(out), "linear", std::move(inputs),
                                [m, n, kk, has_bias](Node<T>& self) {
                                  auto& nx = *self.inputs[0];
                                  auto& nw = *self.inputs[1];
                                  const auto& kt = kern<T>();
                                  if (nx.requires_grad)
                                    kt.gemm_nt(m, kk, n, self.grad.data(), nw.value.data(),
                                               nx.grad_buffer().data(), true);
                                  if (nw.requires_grad)
                                    kt.gemm_tn(kk, n, m, nx.value.data(), self.grad.data(),
                                               nw.grad_buffer().data(), true);
                                  if (has_bias && self.inputs[2]->requires_grad) {
                                    auto gb = self.inputs[2]->grad_buffer();
                                    for (std::size_t i = 0; i < m; ++i)
                                      for (std::size_t j = 0; j < n; ++j) gb[j] += self.grad[i * n + j];
                                  }
                                });
}

template <typename T>
Tensor<T> bmm(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank(a, 3, "bmm");
  require_rank(b, 3, "bmm");
  if (a.dim(0) != b.dim(0) || a.dim(2) != b.dim(1)) {
    throw DimensionError("bmm: incompatible " + shape_string(a.shape()) + " * " + shape_string(b.shape()));
  }
  const std::size_t g = a.dim(0), m = a.dim(1), kk = a.dim(2), n = b.dim(2);
  std::vector<T> out(g * m * n);
  const auto& kt = kern<T>();
  for (std::size_t i = 0; i < g; ++i)
    kt.gemm_nn(m, n, kk, a.data().data() + i * m * kk, b.data().data() + i * kk * n, out.data() + i * m * n,
               false);
  return detail::make_result<T>({g, m, n}, std::move(out), "bmm", {a, b}, [g, m, n, kk](Node<T>& self) {
    auto& na = *self.inputs[0];
    auto& nb = *self.inputs[1];
    const auto& kt2 = kern<T>();
    for (std::size_t i = 0; i < g; ++i) {
      const T* dc = self.grad.data() + i * m * n;
      if (na.requires_grad)
        kt2.gemm_nt(m, kk, n, dc, nb.value.data() + i * kk * n, na.grad_buffer().data() + i * m * kk, true);
      if (nb.requires_grad)
        kt2.gemm_tn(kk, n, m, na.value.data() + i * m * kk, dc, nb.grad_buffer().data() + i * kk * n, true);
    }
  });
}

template <typename T>
Tensor<T> bmm_nt(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank(a, 3, "bmm_nt");
  require_rank(b, 3, "bmm_nt");
  if (a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2)) {
    throw DimensionError("bmm_nt: incompatible " + shape_string(a.shape()) + " * " +
                         shape_string(b.shape()) + "^T");
  }
  const std::size_t g = a.dim(0), m = a.dim(1), kk = a.dim(2), n = b.dim(1);
  std::vector<T> out(g * m * n);
  const auto& kt = kern<T>();
  for (std::size_t i = 0; i < g; ++i)
    kt.gemm_nt(m, n, kk, a.data().data() + i * m * kk, b.data().data() + i * n * kk, out.data() + i * m * n,
               false);
  return detail::make_result<T>({g, m, n}, std::move(out), "bmm_nt", {a, b}, [g, m, n, kk](Node<T>& self) {
    auto& na = *self.inputs[0];
    auto& nb = *self.inputs[1];
    const auto& kt2 = kern<T>();
    for (std::size_t i = 0; i < g; ++i) {
      const T* dc = self.grad.data() + i * m * n;
      if (na.requires_grad)
        kt2.gemm_nn(m, kk, n, dc, nb.value.data() + i * n * kk, na.grad_buffer().data() + i * m * kk, true);
      if (nb.requires_grad)
        kt2.gemm_tn(n, kk, m, dc, na.value.data() + i * m * kk, nb.grad_buffer().data() + i * n * kk, true);
    }
  });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "add");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return detail::make_result<T>(a.shape(), std::move(out), "add", {a, b}, [](Node<T>& self) {
    for (auto& in : self.inputs) {
      if (!in->requires_grad) continue;
      auto g = in->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "sub");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return detail::make_result<T>(a.shape(), std::move(out), "sub", {a, b}, [](Node<T>& self) {
    if (self.inputs[0]->requires_grad) {
      auto g = self.inputs[0]->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (self.inputs[1]->requires_grad) {
      auto g = self.inputs[1]->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "mul");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return detail::make_result<T>(a.shape(), std::move(out), "mul", {a, b}, [](Node<T>& self) {
    auto& na = *self.inputs[0];
    auto& nb = *self.inputs[1];
    if (na.requires_grad) {
      auto g = na.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * nb.value[i];
    }
    if (nb.requires_grad) {
      auto g = nb.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * na.value[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  return unary<T>(
      a, "scale", [factor](T x) { return factor * x; }, [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> minimum(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "minimum");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(a.data()[i], b.data()[i]);
  return detail::make_result<T>(a.shape(), std::move(out), "minimum", {a, b}, [](Node<T>& self) {
    auto& na = *self.inputs[0];
    auto& nb = *self.inputs[1];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const bool first = na.value[i] <= nb.value[i];
      if (first && na.requires_grad) na.grad_buffer()[i] += self.grad[i];
      if (!first && nb.requires_grad) nb.grad_buffer()[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> square(const Tensor<T>& a) {
  return unary<T>(
      a, "square", [](T x) { return x * x; }, [](T x, T) { return T(2) * x; });
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
  std::vector<T> out(x.size());
  kern<T>().leaky_relu(x.size(), x.data().data(), out.data(), slope);
  return detail::make_result<T>(x.shape(), std::move(out), "leaky_relu", {x}, [slope](Node<T>& self) {
    auto& src = *self.inputs[0];
    auto g = src.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += src.value[i] >= T(0) ? self.grad[i] : slope * self.grad[i];
  });
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& x) {
  return unary<T>(
      x, "tanh", [](T v) { return std::tanh(v); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis) {
  if (axis >= x.rank()) {
    throw DimensionError("softmax: axis " + std::to_string(axis) + " invalid for shape " +
                         shape_string(x.shape()));
  }
  const auto& shape = x.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const std::size_t len = shape[axis];
  std::vector<T> out(x.size());
  const auto in = x.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < inner; ++s) {
      const std::size_t base = o * len * inner + s;
      T mx = in[base];
      for (std::size_t j = 1; j < len; ++j) mx = std::max(mx, in[base + j * inner]);
      T total = T(0);
      for (std::size_t j = 0; j < len; ++j) {
        const T e = std::exp(in[base + j * inner] - mx);
        out[base + j * inner] = e;
        total += e;
      }
      for (std::size_t j = 0; j < len; ++j) out[base + j * inner] /= total;
    }
  }
  return detail::make_result<T>(shape, std::move(out), "softmax", {x}, [outer, inner, len](Node<T>& self) {
    auto g = self.inputs[0]->grad_buffer();
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t s = 0; s < inner; ++s) {
        const std::size_t base = o * len * inner + s;
        T dot = T(0);
        for (std::size_t j = 0; j < len; ++j) dot += self.value[base + j * inner] * self.grad[base + j * inner];
        for (std::size_t j = 0; j < len; ++j) {
          const std::size_t idx = base + j * inner;
          g[idx] += self.value[idx] * (self.grad[idx] - dot);
        }
      }
    }
  });
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, T eps) {
  if (x.rank() == 0) throw DimensionError("layer_norm: scalar input");
  const std::size_t d = x.shape().back();
  if (gain.size() != d || bias.size() != d) {
    throw DimensionError("layer_norm: gain " + shape_string(gain.shape()) + " / bias " +
                         shape_string(bias.shape()) + " do not match input " + shape_string(x.shape()));
  }
  const std::size_t rows = x.size() / d;
  auto normalized = std::make_shared<std::vector<T>>(x.size());
  auto inv_std = std::make_shared<std::vector<T>>(rows);
  std::vector<T> out(x.size());
  const auto in = x.data();
  const auto gv = gain.data();
  const auto bv = bias.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = in.data() + r * d;
    T mu = T(0);
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<T>(d);
    T var = T(0);
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<T>(d);
    const T rstd = T(1) / std::sqrt(var + eps);
    (*inv_std)[r] = rstd;
    for (std::size_t j = 0; j < d; ++j) {
      const T xh = (row[j] - mu) * rstd;
      (*normalized)[r * d + j] = xh;
      out[r * d + j] = xh * gv[j] + bv[j];
    }
  }
  return detail::make_result<T>(
      x.shape(), std::move(out), "layer_norm", {x, gain, bias}, [rows, d, normalized, inv_std](Node<T>& self) {
        auto& nx = *self.inputs[0];
        auto& ng = *self.inputs[1];
        auto& nb = *self.inputs[2];
        const auto& xh = *normalized;
        if (ng.requires_grad || nb.requires_grad) {
          auto gg = ng.requires_grad ? ng.grad_buffer() : std::span<T>{};
          auto gb = nb.requires_grad ? nb.grad_buffer() : std::span<T>{};
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < d; ++j) {
              const T dy = self.grad[r * d + j];
              if (!gg.empty()) gg[j] += dy * xh[r * d + j];
              if (!gb.empty()) gb[j] += dy;
            }
        }
        if (!nx.requires_grad) return;
        auto gx = nx.grad_buffer();
        std::vector<T> dxh(d);
        for (std::size_t r = 0; r < rows; ++r) {
          T mean_dxh = T(0), mean_dxh_xh = T(0);
          for (std::size_t j = 0; j < d; ++j) {
            dxh[j] = self.grad[r * d + j] * ng.value[j];
            mean_dxh += dxh[j];
            mean_dxh_xh += dxh[j] * xh[r * d + j];
          }
          mean_dxh /= static_cast<T>(d);
          mean_dxh_xh /= static_cast<T>(d);
          const T rstd = (*inv_std)[r];
          for (std::size_t j = 0; j < d; ++j)
            gx[r * d + j] += rstd * (dxh[j] - mean_dxh - xh[r * d + j] * mean_dxh_xh);
        }
      });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  T total = T(0);
  for (T v : x.data()) total += v;
  return detail::make_result<T>({}, {total}, "sum", {x}, [](Node<T>& self) {
    auto g = self.inputs[0]->grad_buffer();
    for (auto& v : g) v += self.grad[0];
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& x) {
  if (x.size() == 0) throw ContractError("mean of empty tensor");
  T total = T(0);
  for (T v : x.data()) total += v;
  const T count = static_cast<T>(x.size());
  return detail::make_result<T>({}, {total / count}, "mean", {x}, [count](Node<T>& self) {
    auto g = self.inputs[0]->grad_buffer();
    const T share = self.grad[0] / count;
    for (auto& v : g) v += share;
  });
}

template <typename T>
Tensor<T> sum_cols(const Tensor<T>& x) {
  require_rank(x, 2, "sum_cols");
  const std::size_t r = x.dim(0), c = x.dim(1);
  std::vector<T> out(r, T(0));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i] += x.data()[i * c + j];
  return detail::make_result<T>({r, 1}, std::move(out), "sum_cols", {x}, [r, c](Node<T>& self) {
    auto g = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) g[i * c + j] += self.grad[i];
  });
}

template <typename T>
Tensor<T> mse(const Tensor<T>& pred, const Tensor<T>& target) {
  require_same_shape(pred, target, "mse");
  if (pred.size() == 0) throw ContractError("mse of empty tensors");
  T total = T(0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const T diff = pred.data()[i] - target.data()[i];
    total += diff * diff;
  }
  const T count = static_cast<T>(pred.size());
  return detail::make_result<T>({}, {total / count}, "mse", {pred, target}, [count](Node<T>& self) {
    auto& np = *self.inputs[0];
    auto& nt = *self.inputs[1];
    const T coef = T(2) * self.grad[0] / count;
    for (std::size_t i = 0; i < np.value.size(); ++i) {
      const T d = coef * (np.value[i] - nt.value[i]);
      if (np.requires_grad) np.grad_buffer()[i] += d;
      if (nt.requires_grad) nt.grad_buffer()[i] -= d;
    }
  });
}

template <typename T>
Tensor<T> concat_cols(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  const std::size_t rows = parts.front().rank() == 2 ? parts.front().dim(0) : 0;
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.rank() != 2 || p.dim(0) != rows) {
      throw DimensionError("concat_cols: part " + shape_string(p.shape()) + " incompatible with " +
                           shape_string(parts.front().shape()));
    }
    widths.push_back(p.dim(1));
    total += p.dim(1);
  }
  std::vector<T> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto src = parts[k].data();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(src.data() + r * widths[k], widths[k], out.data() + r * total + offset);
    offset += widths[k];
  }
  return detail::make_result<T>({rows, total}, std::move(out), "concat_cols", parts,
                                [rows, total, widths](Node<T>& self) {
                                  std::size_t off = 0;
                                  for (std::size_t k = 0; k < widths.size(); ++k) {
                                    auto& in = *self.inputs[k];
                                    if (in.requires_grad) {
                                      auto g = in.grad_buffer();
                                      for (std::size_t r = 0; r < rows; ++r)
                                        for (std::size_t j = 0; j < widths[k]; ++j)
                                          g[r * widths[k] + j] += self.grad[r * total + off + j];
                                    }
                                    off += widths[k];
                                  }
                                });
}

template <typename T>
Tensor<T> slice_cols(const Tensor<T>& x, std::size_t begin, std::size_t end) {
  require_rank(x, 2, "slice_cols");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (begin > end || end > cols) {
    throw DimensionError("slice_cols: [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + shape_string(x.shape()));
  }
  const std::size_t w = end - begin;
  std::vector<T> out(rows * w);
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(x.data().data() + r * cols + begin, w, out.data() + r * w);
  return detail::make_result<T>({rows, w}, std::move(out), "slice_cols", {x}, [rows, cols, begin, w](Node<T>& self) {
    auto g = self.inputs[0]->grad_buffer();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < w; ++j) g[r * cols + begin + j] += self.grad[r * w + j];
  });
}

template <typename T>
Tensor<T> stack_agents(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ContractError("stack_agents: no inputs");
  const auto& first = parts.front();
  require_rank(first, 2, "stack_agents");
  const std::size_t batch = first.dim(0), d = first.dim(1), n = parts.size();
  for (const auto& p : parts) {
    if (p.shape() != first.shape()) {
      throw DimensionError("stack_agents: " + shape_string(p.shape()) + " vs " + shape_string(first.shape()));
    }
  }
  std::vector<T> out(batch * n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = parts[i].data();
    for (std::size_t b = 0; b < batch; ++b) std::copy_n(src.data() + b * d, d, out.data() + (b * n + i) * d);
  }
  return detail::make_result<T>({batch * n, d}, std::move(out), "stack_agents", parts, [batch, n, d](Node<T>& self) {
    for (std::size_t i = 0; i < n; ++i) {
      auto& in = *self.inputs[i];
      if (!in.requires_grad) continue;
      auto g = in.grad_buffer();
      for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t j = 0; j < d; ++j) g[b * d + j] += self.grad[(b * n + i) * d + j];
    }
  });
}

template <typename T>
Tensor<T> agent_rows(const Tensor<T>& stacked, std::size_t agents, std::size_t index) {
  require_rank(stacked, 2, "agent_rows");
  if (agents == 0 || stacked.dim(0) % agents != 0 || index >= agents) {
    throw DimensionError("agent_rows: cannot take agent " + std::to_string(index) + " of " +
                         std::to_string(agents) + " from " + shape_string(stacked.shape()));
  }
  const std::size_t batch = stacked.dim(0) / agents, d = stacked.dim(1);
  std::vector<T> out(batch * d);
  for (std::size_t b = 0; b < batch; ++b)
    std::copy_n(stacked.data().data() + (b * agents + index) * d, d, out.data() + b * d);
  return detail::make_result<T>({batch, d}, std::move(out), "agent_rows", {stacked},
                                [batch, d, agents, index](Node<T>& self) {
                                  auto g = self.inputs[0]->grad_buffer();
                                  for (std::size_t b = 0; b < batch; ++b)
                                    for (std::size_t j = 0; j < d; ++j)
                                      g[(b * agents + index) * d + j] += self.grad[b * d + j];
                                });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  if (numel(shape) != x.size()) {
    throw DimensionError("reshape: " + shape_string(x.shape()) + " -> " + shape_string(shape));
  }
  std::vector<T> out(x.data().begin(), x.data().end());
  return detail::make_result<T>(std::move(shape), std::move(out), "reshape", {x}, [](Node<T>& self) {
    auto g = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

template <typename T>
Tensor<T> split_heads(const Tensor<T>& x, std::size_t agents, std::size_t heads) {
  require_rank(x, 2, "split_heads");
  if (agents == 0 || heads == 0 || x.dim(0) % agents != 0 || x.dim(1) % heads != 0) {
    throw DimensionError("split_heads: " + shape_string(x.shape()) + " not divisible into " +
                         std::to_string(agents) + " agents x " + std::to_string(heads) + " heads");
  }
  const std::size_t batch = x.dim(0) / agents, width = x.dim(1), d = width / heads;
  std::vector<T> out(x.size());
  const auto in = x.data();
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t i = 0; i < agents; ++i)
      for (std::size_t h = 0; h < heads; ++h)
        std::copy_n(in.data() + (b * agents + i) * width + h * d, d,
                    out.data() + ((b * heads + h) * agents + i) * d);
  return detail::make_result<T>(
      {batch * heads, agents, d}, std::move(out), "split_heads", {x}, [batch, agents, heads, d, width](Node<T>& self) {
        auto g = self.inputs[0]->grad_buffer();
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t i = 0; i < agents; ++i)
            for (std::size_t h = 0; h < heads; ++h)
              for (std::size_t j = 0; j < d; ++j)
                g[(b * agents + i) * width + h * d + j] += self.grad[((b * heads + h) * agents + i) * d + j];
      });
}

template <typename T>
Tensor<T> merge_heads(const Tensor<T>& x, std::size_t heads) {
  require_rank(x, 3, "merge_heads");
  if (heads == 0 || x.dim(0) % heads != 0) {
    throw DimensionError("merge_heads: " + shape_string(x.shape()) + " not divisible by " +
                         std::to_string(heads) + " heads");
  }
  const std::size_t batch = x.dim(0) / heads, agents = x.dim(1), d = x.dim(2), width = heads * d;
  std::vector<T> out(x.size());
  const auto in = x.data();
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t h = 0; h < heads; ++h)
      for (std::size_t i = 0; i < agents; ++i)
        std::copy_n(in.data() + ((b * heads + h) * agents + i) * d, d,
                    out.data() + (b * agents + i) * width + h * d);
  return detail::make_result<T>(
      {batch * agents, width}, std::move(out), "merge_heads", {x}, [batch, agents, heads, d, width](Node<T>& self) {
        auto g = self.inputs[0]->grad_buffer();
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t h = 0; h < heads; ++h)
            for (std::size_t i = 0; i < agents; ++i)
              for (std::size_t j = 0; j < d; ++j)
                g[((b * heads + h) * agents + i) * d + j] += self.grad[(b * agents + i) * width + h * d + j];
      });
}

#define SAMARL_INSTANTIATE_OPS(T)                                                            \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                             \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);           \
  template Tensor<T> bmm(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> bmm_nt(const Tensor<T>&, const Tensor<T>&);                             \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> scale(const Tensor<T>&, T);                                             \
  template Tensor<T> minimum(const Tensor<T>&, const Tensor<T>&);                            \
  template Tensor<T> square(const Tensor<T>&);                                               \
  template Tensor<T> leaky_relu(const Tensor<T>&, T);                                        \
  template Tensor<T> tanh(const Tensor<T>&);                                                 \
  template Tensor<T> softmax(const Tensor<T>&, std::size_t);                                 \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T);    \
  template Tensor<T> sum(const Tensor<T>&);                                                  \
  template Tensor<T> mean(const Tensor<T>&);                                                 \
  template Tensor<T> sum_cols(const Tensor<T>&);                                             \
  template Tensor<T> mse(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> concat_cols(const std::vector<Tensor<T>>&);                             \
  template Tensor<T> slice_cols(const Tensor<T>&, std::size_t, std::size_t);                 \
  template Tensor<T> stack_agents(const std::vector<Tensor<T>>&);                            \
  template Tensor<T> agent_rows(const Tensor<T>&, std::size_t, std::size_t);                 \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                       \
  template Tensor<T> split_heads(const Tensor<T>&, std::size_t, std::size_t);                \
  template Tensor<T> merge_heads(const Tensor<T>&, std::size_t);

SAMARL_INSTANTIATE_OPS(float)
SAMARL_INSTANTIATE_OPS(double)

#undef SAMARL_INSTANTIATE_OPS

}  // namespace samarl::nd

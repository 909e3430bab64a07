#pragma once

// Differentiable primitives. Every op records a backward rule when grad mode is
// on and at least one input requires gradients; otherwise it is a plain
// forward computation.

#include <cstddef>
#include <vector>

#include "samarl/ndmath/tensor.hpp"

namespace samarl::nd {

inline constexpr double kLeakySlope = 0.01;

/// [m x k] * [k x n] -> [m x n]
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

/// x[m x k] * w[k x n] + bias[n]. An undefined or empty bias is skipped.
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias);

/// Batched products over a leading group axis: a[G x m x k] * b[G x k x n].
template <typename T>
Tensor<T> bmm(const Tensor<T>& a, const Tensor<T>& b);
/// a[G x m x k] * b[G x n x k]^T -> [G x m x n]
template <typename T>
Tensor<T> bmm_nt(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);
/// Elementwise minimum; the gradient goes to the smaller operand (ties: first).
template <typename T>
Tensor<T> minimum(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> square(const Tensor<T>& a);

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope = T(kLeakySlope));
template <typename T>
Tensor<T> tanh(const Tensor<T>& x);

/// Numerically stabilized softmax along `axis`.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis);

/// Normalizes each last-axis slice to zero mean / unit variance, then applies gain and bias.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias,
                     T eps = T(1e-5));

/// Sum of all elements, scalar result.
template <typename T>
Tensor<T> sum(const Tensor<T>& x);
template <typename T>
Tensor<T> mean(const Tensor<T>& x);
/// [R x C] -> [R x 1]
template <typename T>
Tensor<T> sum_cols(const Tensor<T>& x);
/// mean((pred - target)^2)
template <typename T>
Tensor<T> mse(const Tensor<T>& pred, const Tensor<T>& target);

/// Horizontal concatenation of [R x c_i] blocks.
template <typename T>
Tensor<T> concat_cols(const std::vector<Tensor<T>>& parts);
/// Columns [begin, end) of a [R x C] matrix.
template <typename T>
Tensor<T> slice_cols(const Tensor<T>& x, std::size_t begin, std::size_t end);

/// n matrices [B x d] -> [(B*n) x d], row b*n + i taken from parts[i] row b.
template <typename T>
Tensor<T> stack_agents(const std::vector<Tensor<T>>& parts);
/// Inverse view of stack_agents for a single agent: rows i, i+n, i+2n, ...
template <typename T>
Tensor<T> agent_rows(const Tensor<T>& stacked, std::size_t agents, std::size_t index);

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape);

/// [(B*n) x (H*d)] -> [(B*H) x n x d]
template <typename T>
Tensor<T> split_heads(const Tensor<T>& x, std::size_t agents, std::size_t heads);
/// [(B*H) x n x d] -> [(B*n) x (H*d)]
template <typename T>
Tensor<T> merge_heads(const Tensor<T>& x, std::size_t heads);

}  // namespace samarl::nd

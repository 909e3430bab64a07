#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "random_tensors.hpp"
#include "samarl/ndmath/ops.hpp"

using namespace samarl::nd;
using samarl::testing::random_tensor;

namespace {

// Element-by-element triple loop, kept independent of the kernel tables.
std::vector<double> triple_loop(const Tensor<double>& a, const Tensor<double>& b) {
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) out[i * n + j] += a.at({i, p}) * b.at({p, j});
  return out;
}

}  // namespace

TEST(Matmul, IdentityLeavesOperandUnchanged) {
  Tensor<double> eye({2, 2}, {1, 0, 0, 1});
  Tensor<double> b({2, 3}, {1, 2, 3, 4, 5, 6});
  const auto c = matmul(eye, b);
  EXPECT_EQ(c.shape(), (Shape{2, 3}));
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(c.data()[i], b.data()[i]);
}

TEST(Matmul, HandSum) {
  Tensor<double> a({2, 2}, {1, 2, 3, 4});
  Tensor<double> b({2, 1}, {1, 1});
  const auto c = matmul(a, b);
  EXPECT_EQ(c.shape(), (Shape{2, 1}));
  EXPECT_EQ(c.data()[0], 3.0);
  EXPECT_EQ(c.data()[1], 7.0);
}

TEST(Matmul, MatchesTripleLoopOracle) {
  std::mt19937_64 rng(7);
  const auto a = random_tensor<double>({3, 4}, rng);
  const auto b = random_tensor<double>({4, 2}, rng);
  const auto expected = triple_loop(a, b);
  const auto c = matmul(a, b);
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(c.data()[i], expected[i], 1e-14);
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  Tensor<double> a = Tensor<double>::zeros({2, 3});
  Tensor<double> b = Tensor<double>::zeros({2, 3});
  try {
    (void)matmul(a, b);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3] * [2x3]"), std::string::npos) << msg;
  }
}

TEST(Softmax, SymmetricPair) {
  const auto y = softmax(Tensor<double>({2}, {0, 0}), 0);
  EXPECT_DOUBLE_EQ(y.data()[0], 0.5);
  EXPECT_DOUBLE_EQ(y.data()[1], 0.5);
}

TEST(Softmax, ConstantInputIsUniform) {
  for (double c : {-50.0, 0.0, 3.5, 700.0}) {
    const auto y = softmax(Tensor<double>({3}, {c, c, c}), 0);
    for (double v : y.data()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  }
}

TEST(Softmax, DirectExpSumOracle) {
  // Oracle: exp(x_i) / sum_j exp(x_j) without any stabilization.
  const double x[3] = {1, 2, 3};
  double total = 0;
  for (double v : x) total += std::exp(v);
  const auto y = softmax(Tensor<double>({3}, {1, 2, 3}), 0);
  const double frozen[3] = {0.0900, 0.2447, 0.6652};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(y.data()[i], std::exp(x[i]) / total, 1e-15);
    EXPECT_NEAR(y.data()[i], frozen[i], 1e-4);
  }
}

TEST(Softmax, RowsSumToOneAndAreShiftInvariant) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_tensor<double>({4, 5, 3}, rng, -10, 10);
    std::uniform_real_distribution<double> shift_dist(-100, 100);
    const double shift = shift_dist(rng);
    std::vector<double> shifted(x.data().begin(), x.data().end());
    for (auto& v : shifted) v += shift;
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const auto y = softmax(x, axis);
      const auto ys = softmax(Tensor<double>(x.shape(), shifted), axis);
      for (std::size_t i = 0; i < y.size(); ++i) {
        EXPECT_GE(y.data()[i], 0.0);
        EXPECT_NEAR(y.data()[i], ys.data()[i], 1e-9);
      }
    }
    const auto y = softmax(x, 1);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t c = 0; c < 3; ++c) {
        double s = 0;
        for (std::size_t b = 0; b < 5; ++b) s += y.at({a, b, c});
        EXPECT_NEAR(s, 1.0, 1e-9);
      }
  }
}

TEST(Softmax, InvalidAxisThrows) {
  EXPECT_THROW((void)softmax(Tensor<double>::zeros({2, 2}), 2), DimensionError);
}

TEST(LayerNorm, TwoPointSymmetry) {
  const auto y = layer_norm(Tensor<double>({1, 2}, {1, 3}), Tensor<double>::full({2}, 1.0),
                            Tensor<double>::zeros({2}));
  EXPECT_NEAR(y.data()[0], -1.0, 1e-5);
  EXPECT_NEAR(y.data()[1], 1.0, 1e-5);
}

TEST(LayerNorm, ConstantVectorMapsToZeros) {
  const auto y = layer_norm(Tensor<double>({1, 4}, {2.5, 2.5, 2.5, 2.5}), Tensor<double>::full({4}, 1.0),
                            Tensor<double>::zeros({4}));
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(LayerNorm, RandomVectorStatistics) {
  std::mt19937_64 rng(3);
  const auto x = random_tensor<double>({1, 8}, rng, -5, 5);
  const auto y = layer_norm(x, Tensor<double>::full({8}, 1.0), Tensor<double>::zeros({8}));
  const double mu = std::accumulate(y.data().begin(), y.data().end(), 0.0) / 8.0;
  double var = 0;
  for (double v : y.data()) var += (v - mu) * (v - mu);
  var /= 8.0;
  EXPECT_LT(std::abs(mu), 1e-6);
  EXPECT_NEAR(var, 1.0, 1e-3);
}

TEST(LeakyRelu, Branches) {
  const auto y = leaky_relu(Tensor<double>({3}, {2.0, -1.0, 0.0}));
  EXPECT_EQ(y.data()[0], 2.0);
  EXPECT_DOUBLE_EQ(y.data()[1], -0.01);
  EXPECT_EQ(y.data()[2], 0.0);
  const auto yf = leaky_relu(Tensor<float>({2}, {-1.0f, 3.0f}));
  EXPECT_FLOAT_EQ(yf.data()[0], -0.01f);
  EXPECT_FLOAT_EQ(yf.data()[1], 3.0f);
}

TEST(Backward, SumGivesOnes) {
  auto p = Tensor<double>::full({2, 3}, 0.7, true);
  backward(sum(p));
  for (double g : p.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Backward, SumOfSquares) {
  Tensor<double> p({2}, {1, 2}, true);
  backward(sum(square(p)));
  EXPECT_EQ(p.grad()[0], 2.0);
  EXPECT_EQ(p.grad()[1], 4.0);
}

TEST(Backward, NonScalarLossIsContractError) {
  auto p = Tensor<double>::full({2}, 1.0, true);
  EXPECT_THROW(backward(square(p)), ContractError);
}

TEST(Backward, UnreachedParameterKeepsZeroGrad) {
  auto used = Tensor<double>::full({2}, 1.0, true);
  auto unused = Tensor<double>::full({2}, 1.0, true);
  used.zero_grad();
  unused.zero_grad();
  backward(sum(used));
  for (double g : unused.grad()) EXPECT_EQ(g, 0.0);
}

TEST(Backward, NoGradGuardStopsRecording) {
  auto p = Tensor<double>::full({2}, 1.0, true);
  NoGradGuard guard;
  const auto y = sum(square(p));
  EXPECT_FALSE(y.requires_grad());
}

TEST(Tape, InputsPrecedeConsumers) {
  auto a = Tensor<double>::full({2, 2}, 0.5, true);
  auto b = Tensor<double>::full({2, 2}, 0.25, true);
  const auto c = matmul(a, b);
  const auto d = add(c, a);
  const auto loss = sum(leaky_relu(d));
  const auto tape = Tape<double>::record(loss);
  const auto& nodes = tape.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (const auto& in : nodes[i]->inputs) {
      const auto pos = std::find(nodes.begin(), nodes.end(), in.get()) - nodes.begin();
      EXPECT_LT(static_cast<std::size_t>(pos), i);
    }
  EXPECT_EQ(tape.op_names().back(), "sum");
}

TEST(Tensor, ShapeDataMismatchThrows) {
  EXPECT_THROW(Tensor<double>({2, 2}, {1, 2, 3}), DimensionError);
}

TEST(Heads, SplitMergeRoundTrip) {
  std::mt19937_64 rng(5);
  const auto x = random_tensor<double>({6, 8}, rng);  // batch 2, agents 3, heads 2 x width 4
  const auto split = split_heads(x, 3, 2);
  EXPECT_EQ(split.shape(), (Shape{4, 3, 4}));
  // head 1 of batch 1, agent 2 equals columns 4..7 of row 1*3+2
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(split.at({1 * 2 + 1, 2, j}), x.at({5, 4 + j}));
  const auto merged = merge_heads(split, 2);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(merged.data()[i], x.data()[i]);
}

TEST(Agents, StackAndSelectRows) {
  Tensor<double> a({2, 1}, {1, 2});
  Tensor<double> b({2, 1}, {10, 20});
  const auto s = stack_agents<double>({a, b});
  EXPECT_EQ(std::vector<double>(s.data().begin(), s.data().end()), (std::vector<double>{1, 10, 2, 20}));
  const auto back = agent_rows(s, 2, 1);
  EXPECT_EQ(std::vector<double>(back.data().begin(), back.data().end()), (std::vector<double>{10, 20}));
}

TEST(Determinism, RepeatedForwardIsBitwiseIdentical) {
  std::mt19937_64 rng(9);
  const auto x = random_tensor<float>({37, 29}, rng);
  const auto w = random_tensor<float>({29, 45}, rng);
  const auto b = random_tensor<float>({45}, rng);
  const auto y1 = layer_norm(linear(x, w, b), Tensor<float>::full({45}, 1.f), Tensor<float>::zeros({45}));
  const auto y2 = layer_norm(linear(x, w, b), Tensor<float>::full({45}, 1.f), Tensor<float>::zeros({45}));
  for (std::size_t i = 0; i < y1.size(); ++i) EXPECT_EQ(y1.data()[i], y2.data()[i]);
}

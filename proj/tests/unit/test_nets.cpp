#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "net_helpers.hpp"
#include "probe.hpp"
#include "samarl/ndmath/ops.hpp"
#include "samarl/nets/attention.hpp"
#include "samarl/nets/critic.hpp"
#include "samarl/nets/mlp.hpp"

using namespace samarl;
namespace support = samarl::testing;
using nd::Tensor;
using support::gradcheck_params;
using support::permute;
using support::Probe;
using support::random_blocks;
using support::random_tensor;

namespace {

void set_identity(Tensor<double>& t) {
  auto d = t.mutable_data();
  std::fill(d.begin(), d.end(), 0.0);
  for (std::size_t i = 0; i < std::min(t.dim(0), t.dim(1)); ++i) d[i * t.dim(1) + i] = 1.0;
}

void expect_gradcheck(const nd::GradCheckReport& r, double tol = 1e-3) {
  EXPECT_TRUE(r.finite) << r.diagnostic;
  EXPECT_GT(r.elements_checked, 0u);
  EXPECT_LT(r.max_relative_error, tol) << "worst " << r.worst_parameter << "[" << r.worst_index
                                       << "] analytic=" << r.worst_analytic << " numeric=" << r.worst_numeric;
}

}  // namespace

TEST(MlpActor, ZeroParametersGiveZeroAction) {
  std::mt19937_64 rng(1);
  nets::MlpActor<double> actor(10, 2, {}, rng);
  support::zero_parameters(actor);
  const auto a = actor.forward(random_tensor<double>({4, 10}, rng));
  for (double v : a.data()) EXPECT_EQ(v, 0.0);
}

TEST(MlpActor, DeterministicAndTanhBounded) {
  std::mt19937_64 rng(2);
  nets::MlpActor<float> actor(14, 2, {}, rng);
  for (auto& p : actor.named_parameters())
    for (auto& v : p.tensor.mutable_data()) v *= 8.0f;
  const auto obs = random_tensor<float>({64, 14}, rng, -5, 5);
  const auto a1 = actor.forward(obs);
  const auto a2 = actor.forward(obs);
  EXPECT_EQ(a1.shape(), (nd::Shape{64, 2}));
  for (std::size_t i = 0; i < a1.size(); ++i) {
    EXPECT_EQ(a1.data()[i], a2.data()[i]);
    EXPECT_GE(a1.data()[i], -1.0f);
    EXPECT_LE(a1.data()[i], 1.0f);
  }
}

TEST(MlpActor, ArchitectureIsThreeHiddenLayersOf64) {
  std::mt19937_64 rng(3);
  nets::MlpActor<float> actor(14, 2, {}, rng);
  const auto params = actor.named_parameters();
  ASSERT_EQ(params.size(), 8u);
  EXPECT_EQ(params[0].tensor.shape(), (nd::Shape{14, 64}));
  EXPECT_EQ(params[2].tensor.shape(), (nd::Shape{64, 64}));
  EXPECT_EQ(params[4].tensor.shape(), (nd::Shape{64, 64}));
  EXPECT_EQ(params[6].tensor.shape(), (nd::Shape{64, 2}));
  EXPECT_EQ(actor.parameter_count(), 14u * 64 + 64 + 2 * (64 * 64 + 64) + 64 * 2 + 2);
}

TEST(MlpActor, ObservationWidthMismatchIsContractError) {
  std::mt19937_64 rng(4);
  nets::MlpActor<float> actor(14, 2, {}, rng);
  EXPECT_THROW(actor.forward(Tensor<float>::zeros({3, 13})), nd::ContractError);
}

TEST(Init, UniformWithinInverseSqrtFanIn) {
  std::mt19937_64 rng(5);
  nets::Linear<float> layer(25, 40, rng);
  for (auto& p : layer.named_parameters())
    for (float v : p.tensor.data()) EXPECT_LE(std::abs(v), 0.2f);
}

TEST(Module, CloneIsDeepAndCopyFromMatches) {
  std::mt19937_64 rng(6);
  nets::MlpActor<float> a(5, 2, {16, 2}, rng);
  auto b = a.clone();
  a.named_parameters()[0].tensor.mutable_data()[0] += 1.0f;
  EXPECT_NE(a.named_parameters()[0].tensor.data()[0], b->named_parameters()[0].tensor.data()[0]);
  b->copy_from(a);
  EXPECT_EQ(a.named_parameters()[0].tensor.data()[0], b->named_parameters()[0].tensor.data()[0]);
}

TEST(SoftUpdate, DefaultRateExample) {
  std::mt19937_64 rng(7);
  nets::Linear<double> target(1, 1, rng), main(1, 1, rng);
  target.weight().mutable_data()[0] = 0.0;
  main.weight().mutable_data()[0] = 1.0;
  nets::soft_update(target, main, 0.01);
  EXPECT_DOUBLE_EQ(target.weight().data()[0], 0.01);
}

TEST(SoftUpdate, UnitRateIsHardCopyAndEqualIsFixedPoint) {
  std::mt19937_64 rng(8);
  nets::MlpActor<double> target(4, 2, {8, 2}, rng), main(4, 2, {8, 2}, rng);
  nets::soft_update(target, main, 1.0);
  const auto t = target.named_parameters(), m = main.named_parameters();
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t[i].tensor.size(); ++j) EXPECT_EQ(t[i].tensor.data()[j], m[i].tensor.data()[j]);
  nets::soft_update(target, main, 0.3);
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t[i].tensor.size(); ++j) EXPECT_EQ(t[i].tensor.data()[j], m[i].tensor.data()[j]);
}

TEST(SoftUpdate, RejectsShapeMismatchAndBadRate) {
  std::mt19937_64 rng(9);
  nets::Linear<double> a(2, 3, rng), b(3, 2, rng);
  EXPECT_THROW(nets::soft_update(a, b, 0.5), nd::ContractError);
  EXPECT_THROW(nets::soft_update(a, a, 0.0), nd::ContractError);
  EXPECT_THROW(nets::soft_update(a, a, 1.5), nd::ContractError);
}

TEST(SoftUpdate, TargetStaysInsideHullOfMainHistory) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-3, 3);
  nets::Linear<double> target(1, 1, rng, false), main(1, 1, rng, false);
  double lo = target.weight().data()[0], hi = lo;
  for (int s = 0; s < 500; ++s) {
    main.weight().mutable_data()[0] = u(rng);
    lo = std::min(lo, main.weight().data()[0]);
    hi = std::max(hi, main.weight().data()[0]);
    nets::soft_update(target, main, 0.01);
    ASSERT_GE(target.weight().data()[0], lo);
    ASSERT_LE(target.weight().data()[0], hi);
  }
}

TEST(AttentionBlock, SingleAgentAttentionIsValueProjection) {
  std::mt19937_64 rng(11);
  nets::AttentionConfig cfg;
  nets::SelfAttentionBlock<double> block(64, 64, cfg, rng);
  const auto x = random_tensor<double>({5, 64}, rng);  // 5 batch elements, n = 1
  const auto att = block.attend(x, 1);
  const auto expected = nd::matmul(x, block.w_value());
  ASSERT_EQ(att.shape(), expected.shape());
  for (std::size_t i = 0; i < att.size(); ++i) EXPECT_EQ(att.data()[i], expected.data()[i]);
}

TEST(AttentionBlock, IdentityProjectionsHandExample) {
  std::mt19937_64 rng(12);
  nets::AttentionConfig cfg;
  cfg.heads = 1;
  cfg.key_dim = 2;
  cfg.value_dim = 2;
  cfg.residual = false;
  cfg.layer_norm = false;
  nets::SelfAttentionBlock<double> block(2, 2, cfg, rng);
  set_identity(block.w_query());
  set_identity(block.w_key());
  set_identity(block.w_value());
  set_identity(block.w_out().weight());
  std::fill(block.w_out().bias().mutable_data().begin(), block.w_out().bias().mutable_data().end(), 0.0);
  const Tensor<double> x({2, 2}, {1, 0, 0, 1});
  const auto y = block.forward(x, 2);
  const double hi = std::exp(1.0) / (std::exp(1.0) + 1.0), lo = 1.0 / (std::exp(1.0) + 1.0);
  EXPECT_NEAR(y.at({0, 0}), 0.731, 1e-3);
  EXPECT_NEAR(y.at({0, 1}), 0.269, 1e-3);
  EXPECT_NEAR(y.at({1, 0}), 0.269, 1e-3);
  EXPECT_NEAR(y.at({1, 1}), 0.731, 1e-3);
  EXPECT_NEAR(y.at({0, 0}), hi, 1e-12);
  EXPECT_NEAR(y.at({0, 1}), lo, 1e-12);
}

TEST(AttentionBlock, PermutingRowsPermutesOutputs) {
  std::mt19937_64 rng(13);
  nets::AttentionConfig cfg;
  nets::SelfAttentionBlock<double> block(64, 64, cfg, rng);
  const std::size_t n = 5, batch = 3;
  const auto x = random_tensor<double>({batch * n, 64}, rng);
  const std::vector<std::size_t> sigma{3, 0, 4, 1, 2};
  std::vector<double> px(x.size());
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t i = 0; i < n; ++i)
      std::copy_n(x.data().data() + (b * n + sigma[i]) * 64, 64, px.data() + (b * n + i) * 64);
  const auto y = block.forward(x, n);
  const auto py = block.forward(Tensor<double>({batch * n, 64}, px), n);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 64; ++j)
        EXPECT_NEAR(py.at({b * n + i, j}), y.at({b * n + sigma[i], j}), 1e-12);
}

TEST(AttentionBlock, StackPreservesAgentAxis) {
  std::mt19937_64 rng(14);
  nets::AttentionConfig cfg = support::small_attention();
  for (std::size_t n : {1u, 2u, 7u}) {
    auto h = random_tensor<double>({4 * n, cfg.model_dim}, rng);
    for (int depth = 0; depth < 4; ++depth) {
      nets::SelfAttentionBlock<double> block(cfg.model_dim, cfg.model_dim, cfg, rng);
      h = block.forward(h, n);
      EXPECT_EQ(h.shape(), (nd::Shape{4 * n, cfg.model_dim}));
    }
  }
}

TEST(AttentionBlock, DefaultLayout) {
  std::mt19937_64 rng(15);
  nets::SelfAttentionBlock<float> block(64, 64, nets::AttentionConfig{}, rng);
  EXPECT_EQ(block.w_query().shape(), (nd::Shape{64, 4 * 16}));
  EXPECT_EQ(block.w_key().shape(), (nd::Shape{64, 4 * 16}));
  EXPECT_EQ(block.w_value().shape(), (nd::Shape{64, 4 * 64}));
  EXPECT_EQ(block.w_out().weight().shape(), (nd::Shape{4 * 64, 64}));
}

TEST(AttentionCritic, OneQPerAgentAndPermutationEquivariant) {
  std::mt19937_64 rng(16);
  const std::size_t n = 4, batch = 6, od = 18, ad = 2;
  nets::AttentionCritic<double> critic(od, ad, n, nets::AttentionConfig{}, rng);
  const auto obs = random_blocks<double>(n, batch, od, rng);
  const auto acts = random_blocks<double>(n, batch, ad, rng);
  const auto q = critic.forward(obs, acts);
  ASSERT_EQ(q.shape(), (nd::Shape{batch, n}));
  const std::vector<std::size_t> sigma{2, 3, 1, 0};
  const auto pq = critic.forward(permute(obs, sigma), permute(acts, sigma));
  const auto total = nets::total_q(q), ptotal = nets::total_q(pq);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(pq.at({b, i}), q.at({b, sigma[i]}), 1e-6);
    EXPECT_NEAR(total.at({b, 0}), ptotal.at({b, 0}), 1e-6);
  }
}

TEST(AttentionCritic, CrossAgentDependence) {
  std::mt19937_64 rng(17);
  const std::size_t n = 3, od = 14, ad = 2;
  nets::AttentionCritic<double> critic(od, ad, n, nets::AttentionConfig{}, rng);
  const auto obs = random_blocks<double>(n, 1, od, rng);
  auto acts = random_blocks<double>(n, 1, ad, rng);
  const double q0 = critic.forward(obs, acts).at({0, 0});
  acts[1] = Tensor<double>({1, 2}, {acts[1].data()[0] + 0.5, acts[1].data()[1] - 0.5});
  const double q0_after = critic.forward(obs, acts).at({0, 0});
  EXPECT_GT(std::abs(q0_after - q0), 1e-6);
}

TEST(AttentionCritic, AgentCountMismatchIsContractError) {
  std::mt19937_64 rng(18);
  nets::AttentionCritic<float> critic(14, 2, 3, nets::AttentionConfig{}, rng);
  const auto obs = random_blocks<float>(3, 2, 14, rng);
  const auto acts = random_blocks<float>(2, 2, 2, rng);
  EXPECT_THROW(critic.forward(obs, acts), nd::ContractError);
}

TEST(TotalQ, Examples) {
  const auto t = nets::total_q(Tensor<double>({1, 3}, {1.0, -0.5, 2.5}));
  EXPECT_EQ(t.shape(), (nd::Shape{1, 1}));
  EXPECT_DOUBLE_EQ(t.item(), 3.0);
  EXPECT_DOUBLE_EQ(nets::total_q(Tensor<double>({1, 1}, {-4.25})).item(), -4.25);
  EXPECT_DOUBLE_EQ(nets::total_q(Tensor<double>({1, 3}, {2.5, 1.0, -0.5})).item(), 3.0);
}

TEST(DoubleMin, Examples) {
  const auto m = nets::double_min(Tensor<double>({1, 2}, {1, 4}), Tensor<double>({1, 2}, {2, 3}));
  EXPECT_EQ(m.data()[0], 1.0);
  EXPECT_EQ(m.data()[1], 3.0);
}

TEST(DoubleCritic, IndependentMembersAndMinBound) {
  std::mt19937_64 rng(19);
  const std::size_t n = 3, od = 14, ad = 2;
  const auto cfg = support::small_attention();
  nets::DoubleCritic<double> dc(std::make_unique<nets::AttentionCritic<double>>(od, ad, n, cfg, rng),
                                std::make_unique<nets::AttentionCritic<double>>(od, ad, n, cfg, rng));
  const auto p1 = dc.first().named_parameters(), p2 = dc.second().named_parameters();
  ASSERT_EQ(p1.size(), p2.size());
  for (std::size_t i = 0; i < p1.size(); ++i) EXPECT_NE(p1[i].tensor.node(), p2[i].tensor.node());
  const auto obs = random_blocks<double>(n, 16, od, rng);
  const auto acts = random_blocks<double>(n, 16, ad, rng);
  const auto q1 = dc.first().forward(obs, acts), q2 = dc.second().forward(obs, acts);
  const auto m = dc.min_forward(obs, acts);
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_LE(m.data()[i], q1.data()[i]);
    EXPECT_LE(m.data()[i], q2.data()[i]);
    EXPECT_EQ(m.data()[i], std::min(q1.data()[i], q2.data()[i]));
  }
  const auto same = nets::double_min(q1, q1);
  for (std::size_t i = 0; i < same.size(); ++i) EXPECT_EQ(same.data()[i], q1.data()[i]);
  EXPECT_THROW(nets::DoubleCritic<double>(dc.first().clone(), nullptr), nd::ContractError);
}

TEST(AttentionActor, CountsBoundsZeroAndEquivariance) {
  std::mt19937_64 rng(20);
  for (std::size_t n : {3u, 5u, 8u}) {
    const std::size_t od = 4 * n + 2;
    nets::AttentionActor<double> actor(od, 2, nets::AttentionConfig{}, rng);
    const auto obs = random_blocks<double>(n, 5, od, rng, -2, 2);
    const auto acts = actor.forward(obs);
    ASSERT_EQ(acts.size(), n);
    for (const auto& a : acts) {
      EXPECT_EQ(a.shape(), (nd::Shape{5, 2}));
      for (double v : a.data()) EXPECT_TRUE(v >= -1.0 && v <= 1.0);
    }
    std::vector<std::size_t> sigma(n);
    std::iota(sigma.rbegin(), sigma.rend(), 0);
    const auto pacts = actor.forward(permute(obs, sigma));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < pacts[i].size(); ++j)
        EXPECT_NEAR(pacts[i].data()[j], acts[sigma[i]].data()[j], 1e-12);
    support::zero_parameters(actor);
    for (const auto& a : actor.forward(obs))
      for (double v : a.data()) EXPECT_EQ(v, 0.0);
  }
}

TEST(NetGradients, MlpActorFullWidth) {
  std::mt19937_64 rng(21);
  nets::MlpActor<double> actor(14, 2, {}, rng);
  const auto obs = random_tensor<double>({3, 14}, rng);
  Probe probe;
  expect_gradcheck(nd::gradient_check([&] { return probe(actor.forward(obs)); }, gradcheck_params(actor)));
}

TEST(NetGradients, SingleAttentionBlock) {
  std::mt19937_64 rng(22);
  const auto cfg = support::small_attention();
  nets::SelfAttentionBlock<double> block(cfg.model_dim, cfg.model_dim, cfg, rng);
  auto x = random_tensor<double>({2 * 3, cfg.model_dim}, rng, -1, 1, true);
  Probe probe;
  auto params = gradcheck_params(block);
  params.push_back({"x", x});
  expect_gradcheck(nd::gradient_check([&] { return probe(block.forward(x, 3)); }, params));
}

TEST(NetGradients, AttentionCriticSingleAgent) {
  std::mt19937_64 rng(23);
  nets::AttentionCritic<double> critic(6, 2, 1, support::small_attention(), rng);
  const auto obs = random_blocks<double>(1, 4, 6, rng);
  const auto acts = random_blocks<double>(1, 4, 2, rng);
  const auto y = random_tensor<double>({4, 1}, rng);
  expect_gradcheck(nd::gradient_check([&] { return nd::mse(critic.forward(obs, acts), y); }, gradcheck_params(critic)));
}

TEST(NetGradients, AttentionCriticTotalQLoss) {
  std::mt19937_64 rng(24);
  const std::size_t n = 3;
  nets::AttentionCritic<double> critic(14, 2, n, support::small_attention(), rng);
  const auto obs = random_blocks<double>(n, 3, 14, rng);
  std::vector<Tensor<double>> acts;
  for (std::size_t i = 0; i < n; ++i) acts.push_back(random_tensor<double>({3, 2}, rng, -1, 1, true));
  const auto y = random_tensor<double>({3, 1}, rng);
  auto params = gradcheck_params(critic);
  for (std::size_t i = 0; i < n; ++i) params.push_back({"action" + std::to_string(i), acts[i]});
  expect_gradcheck(
      nd::gradient_check([&] { return nd::mse(nets::total_q(critic.forward(obs, acts)), y); }, params));
}

TEST(NetGradients, AttentionActor) {
  std::mt19937_64 rng(25);
  nets::AttentionActor<double> actor(14, 2, support::small_attention(), rng);
  const auto obs = random_blocks<double>(3, 2, 14, rng);
  Probe probe;
  expect_gradcheck(nd::gradient_check(
      [&] { return probe(nd::concat_cols(actor.forward(obs))); }, gradcheck_params(actor)));
}

TEST(NetGradients, MlpCritic) {
  std::mt19937_64 rng(26);
  nets::MlpCritic<double> critic(3 * 14 + 3 * 2, {16, 3}, rng);
  const auto obs = random_blocks<double>(3, 4, 14, rng);
  const auto acts = random_blocks<double>(3, 4, 2, rng);
  const auto y = random_tensor<double>({4, 1}, rng);
  expect_gradcheck(nd::gradient_check([&] { return nd::mse(critic.forward(obs, acts), y); }, gradcheck_params(critic)));
}

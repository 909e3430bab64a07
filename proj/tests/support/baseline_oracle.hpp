#pragma once

// Hand-stepped two-agent MADDPG with linear actors and critics, compared with
// the framework's trainer configured with every extension switched off.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "algo_stubs.hpp"
#include "samarl/algo/trainer.hpp"

namespace samarl::testing {

struct BaselineOracleResult {
  double max_error = 0.0;
  std::size_t parameters_compared = 0;
  std::size_t updates = 0;
};

namespace oracle_detail {

struct Adam {
  std::vector<double> m, v;
};

struct LinearNet {
  std::size_t in = 0, out = 0;
  std::vector<double> w;  // [in x out]
  std::vector<double> b;  // [out]
  Adam aw, ab;
  std::uint64_t t = 0;
};

inline void adam_step(LinearNet& net, std::vector<double> gw, std::vector<double> gb, double lr, double clip) {
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double sq = 0.0;
  for (double g : gw) sq += g * g;
  for (double g : gb) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > clip) {
    for (auto& g : gw) g *= clip / norm;
    for (auto& g : gb) g *= clip / norm;
  }
  ++net.t;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(net.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(net.t));
  auto apply = [&](std::vector<double>& p, const std::vector<double>& g, Adam& s) {
    s.m.resize(p.size(), 0.0);
    s.v.resize(p.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      s.m[k] = b1 * s.m[k] + (1 - b1) * g[k];
      s.v[k] = b2 * s.v[k] + (1 - b2) * g[k] * g[k];
      p[k] -= lr * (s.m[k] / c1) / (std::sqrt(s.v[k] / c2) + eps);
    }
  };
  apply(net.w, gw, net.aw);
  apply(net.b, gb, net.ab);
}

inline void soft(LinearNet& target, const LinearNet& main, double tau) {
  for (std::size_t k = 0; k < target.w.size(); ++k) target.w[k] += tau * (main.w[k] - target.w[k]);
  for (std::size_t k = 0; k < target.b.size(); ++k) target.b[k] += tau * (main.b[k] - target.b[k]);
}

inline std::vector<double> apply_linear(const LinearNet& net, const double* x) {
  std::vector<double> y(net.b);
  for (std::size_t k = 0; k < net.in; ++k)
    for (std::size_t j = 0; j < net.out; ++j) y[j] += x[k] * net.w[k * net.out + j];
  return y;
}

inline LinearNet from_trainer(const std::map<std::string, nd::Tensor<double>>& named, const std::string& prefix) {
  LinearNet net;
  const auto& w = named.at(prefix + "weight");
  const auto& b = named.at(prefix + "bias");
  net.in = w.dim(0);
  net.out = w.dim(1);
  net.w.assign(w.data().begin(), w.data().end());
  net.b.assign(b.data().begin(), b.data().end());
  return net;
}

}  // namespace oracle_detail

/// Runs `updates` MADDPG steps (critic, policy, soft update) on random batches
/// through both the trainer and the hand-written oracle; returns the largest
/// absolute parameter difference seen after any step.
inline BaselineOracleResult run_baseline_oracle(std::uint64_t seed, std::size_t updates = 3) {
  using namespace oracle_detail;
  constexpr std::size_t n = 2, od = 3, ad = 2, batch = 6;
  constexpr std::size_t width = n * (od + ad);

  algo::AlgoFlags flags = algo::flags_for(algo::AlgoKind::sa_matd3);
  flags.attention_critic = flags.total_q = flags.one_to_all = flags.attention_actor = false;
  flags.double_q = flags.delayed = flags.smoothing = false;
  algo::TrainConfig cfg = algo::default_config(algo::AlgoKind::sa_matd3);
  cfg.delay_frequency = 1;
  cfg.critic_noise = 0.0;
  cfg.actor_lr = 0.01;
  cfg.critic_lr = 0.02;
  cfg.tau = 0.05;
  cfg.grad_clip = 1.0;

  algo::NetworkFactory<double> factory;
  factory.actor = [=](std::size_t, std::mt19937_64& rng) -> std::unique_ptr<nets::Actor<double>> {
    return std::make_unique<LinearActor<double>>(od, ad, rng);
  };
  factory.critic = [=](std::size_t, std::mt19937_64& rng) -> std::unique_ptr<nets::Critic<double>> {
    return std::make_unique<LinearCritic<double>>(width, rng);
  };
  std::mt19937_64 init(seed);
  algo::Trainer<double> trainer(flags, cfg, {n, od, ad}, factory, init);

  std::map<std::string, nd::Tensor<double>> named;
  for (auto& t : trainer.named_tensors()) named.emplace(t.name, t.tensor);
  std::vector<LinearNet> actor, target_actor, critic, target_critic;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = std::to_string(i);
    actor.push_back(from_trainer(named, "actor" + s + "."));
    target_actor.push_back(from_trainer(named, "target_actor" + s + "."));
    critic.push_back(from_trainer(named, "critic" + s + ".q1."));
    target_critic.push_back(from_trainer(named, "target_critic" + s + ".q1."));
  }

  std::mt19937_64 data(seed ^ 0x5eedULL), noise(seed + 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BaselineOracleResult result;
  for (std::size_t step = 0; step < updates; ++step) {
    // Random batch, shared by both sides.
    std::vector<std::vector<double>> obs(n), acts(n), next(n);
    std::vector<double> reward(batch), done(batch);
    for (std::size_t i = 0; i < n; ++i) {
      obs[i].resize(batch * od);
      next[i].resize(batch * od);
      acts[i].resize(batch * ad);
      for (auto& v : obs[i]) v = u(data);
      for (auto& v : next[i]) v = u(data);
      for (auto& v : acts[i]) v = u(data);
    }
    for (std::size_t b = 0; b < batch; ++b) {
      reward[b] = 3.0 * u(data);
      done[b] = (b % 3 == 2) ? 1.0 : 0.0;
    }
    algo::Batch<double> tb;
    for (std::size_t i = 0; i < n; ++i) {
      tb.obs.emplace_back(nd::Shape{batch, od}, obs[i]);
      tb.next_obs.emplace_back(nd::Shape{batch, od}, next[i]);
      tb.actions.emplace_back(nd::Shape{batch, ad}, acts[i]);
    }
    tb.reward = nd::Tensor<double>({batch, 1}, reward);
    tb.done = nd::Tensor<double>({batch, 1}, done);
    trainer.update(tb, noise, true);

    // Oracle: target actions, per-agent Bellman targets, critic regressions.
    std::vector<std::vector<double>> next_act(n, std::vector<double>(batch * ad));
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t b = 0; b < batch; ++b) {
        const auto a = apply_linear(target_actor[j], &next[j][b * od]);
        for (std::size_t c = 0; c < ad; ++c) next_act[j][b * ad + c] = std::clamp(a[c], -1.0, 1.0);
      }
    }
    auto joint = [&](const std::vector<std::vector<double>>& o, const std::vector<std::vector<double>>& a,
                     std::size_t b) {
      std::vector<double> x;
      for (std::size_t i = 0; i < n; ++i) x.insert(x.end(), o[i].begin() + b * od, o[i].begin() + (b + 1) * od);
      for (std::size_t i = 0; i < n; ++i) x.insert(x.end(), a[i].begin() + b * ad, a[i].begin() + (b + 1) * ad);
      return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> gw(width, 0.0), gb(1, 0.0);
      for (std::size_t b = 0; b < batch; ++b) {
        const auto xt = joint(next, next_act, b);
        const double y = reward[b] + cfg.gamma * (1.0 - done[b]) * apply_linear(target_critic[i], xt.data())[0];
        const auto x = joint(obs, acts, b);
        const double err = apply_linear(critic[i], x.data())[0] - y;
        for (std::size_t k = 0; k < width; ++k) gw[k] += 2.0 / batch * err * x[k];
        gb[0] += 2.0 / batch * err;
      }
      adam_step(critic[i], gw, gb, cfg.critic_lr, cfg.grad_clip);
    }
    // Oracle: each actor ascends its own updated critic through its own action only.
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t offset = n * od + i * ad;
      std::vector<double> gw(od * ad, 0.0), gb(ad, 0.0);
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t c = 0; c < ad; ++c) {
          const double dl_da = -critic[i].w[offset + c] / batch;
          gb[c] += dl_da;
          for (std::size_t k = 0; k < od; ++k) gw[k * ad + c] += obs[i][b * od + k] * dl_da;
        }
      }
      adam_step(actor[i], gw, gb, cfg.actor_lr, cfg.grad_clip);
    }
    for (std::size_t i = 0; i < n; ++i) {
      soft(target_actor[i], actor[i], cfg.tau);
      soft(target_critic[i], critic[i], cfg.tau);
    }

    auto compare = [&](const LinearNet& net, const std::string& prefix) {
      const auto& w = named.at(prefix + "weight").data();
      const auto& b = named.at(prefix + "bias").data();
      for (std::size_t k = 0; k < net.w.size(); ++k) result.max_error = std::max(result.max_error, std::abs(w[k] - net.w[k]));
      for (std::size_t k = 0; k < net.b.size(); ++k) result.max_error = std::max(result.max_error, std::abs(b[k] - net.b[k]));
      result.parameters_compared += net.w.size() + net.b.size();
    };
    for (std::size_t i = 0; i < n; ++i) {
      const auto s = std::to_string(i);
      compare(actor[i], "actor" + s + ".");
      compare(target_actor[i], "target_actor" + s + ".");
      compare(critic[i], "critic" + s + ".q1.");
      compare(target_critic[i], "target_critic" + s + ".q1.");
    }
    ++result.updates;
  }
  return result;
}

}  // namespace samarl::testing

#include "samarl/harness/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "samarl/env/scripted_prey.hpp"
#include "samarl/harness/metrics.hpp"
#include "samarl/nets/mlp.hpp"

namespace samarl::harness {

namespace fs = std::filesystem;

struct Experiment::Learner {
  std::size_t type = 0;
  std::size_t first = 0;
  std::size_t count = 0;
  std::unique_ptr<algo::Trainer<float>> trainer;
  std::unique_ptr<algo::ReplayBuffer<float>> buffer;
};

namespace {

std::string type_prefix(std::size_t type) { return "type" + std::to_string(type) + "."; }

bool prey_learns(const RunConfig& cfg) {
  return cfg.scenario == env::ScenarioKind::predator_prey && cfg.prey == "learned";
}

bool prey_from_checkpoint(const RunConfig& cfg) {
  return cfg.scenario == env::ScenarioKind::predator_prey && cfg.prey != "scripted" && cfg.prey != "learned";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw MetricsError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw MetricsError("write to " + path.string() + " failed");
}

}  // namespace

Experiment::Experiment(RunConfig cfg, bool training)
    : cfg_(std::move(cfg)),
      scenario_(env::make_scenario(cfg_.scenario, cfg_.agents)),
      streams_(cfg_.seed),
      scheduler_(cfg_.train, algo::flags_for(cfg_.algo).delayed) {
  validate(cfg_);
  const auto flags = algo::flags_for(cfg_.algo);
  const std::size_t types = prey_learns(cfg_) ? 2 : 1;
  for (std::size_t t = 0; t < types; ++t) {
    auto l = std::make_unique<Learner>();
    l->type = t;
    l->first = scenario_.first_of_type(t);
    l->count = scenario_.agents_of_type(t);
    const algo::AgentLayout layout{l->count, scenario_.obs_dim(t), env::ScenarioConfig::act_dim};
    l->trainer = std::make_unique<algo::Trainer<float>>(flags, cfg_.train, layout, streams_.init);
    if (training) {
      l->buffer = std::make_unique<algo::ReplayBuffer<float>>(cfg_.train.buffer_capacity, layout.agents,
                                                              layout.obs_dim, layout.act_dim);
    }
    learners_.push_back(std::move(l));
  }
  if (prey_from_checkpoint(cfg_)) {
    const auto ck = nets::load_checkpoint(cfg_.prey);
    if (ck.manifest.scenario != env::scenario_name(cfg_.scenario) || ck.manifest.agents != cfg_.agents) {
      throw nets::LoadError("prey checkpoint " + cfg_.prey + " was written for " + ck.manifest.scenario + " with " +
                            std::to_string(ck.manifest.agents) + " agents");
    }
    for (std::size_t i = 0; i < scenario_.agents_of_type(1); ++i) {
      auto actor = std::make_unique<nets::MlpActor<float>>(scenario_.obs_dim(1), env::ScenarioConfig::act_dim,
                                                           cfg_.train.mlp, streams_.init);
      nets::restore_module(*actor, type_prefix(1) + "actor" + std::to_string(i) + ".", ck);
      fixed_prey_.push_back(std::move(actor));
    }
  }
}

Experiment::~Experiment() = default;

std::size_t Experiment::learner_type(std::size_t k) const { return learners_.at(k)->type; }
algo::Trainer<float>& Experiment::trainer(std::size_t k) { return *learners_.at(k)->trainer; }

const algo::ReplayBuffer<float>& Experiment::buffer(std::size_t k) const {
  const auto& l = *learners_.at(k);
  if (!l.buffer) throw nd::ContractError("experiment was built without replay buffers");
  return *l.buffer;
}

std::vector<float> Experiment::learner_obs(const Learner& l, const std::vector<std::vector<double>>& obs) const {
  std::vector<float> out;
  for (std::size_t i = 0; i < l.count; ++i) {
    const auto& o = obs[l.first + i];
    out.insert(out.end(), o.begin(), o.end());
  }
  return out;
}

std::vector<env::Vec2> Experiment::joint_actions(const env::WorldState& state,
                                                 const std::vector<std::vector<double>>& obs,
                                                 std::mt19937_64* noise,
                                                 std::vector<std::vector<float>>* learner_actions) const {
  std::vector<env::Vec2> actions(scenario_.agents);
  std::vector<bool> assigned(scenario_.agents, false);
  if (learner_actions) learner_actions->clear();
  for (const auto& l : learners_) {
    const auto a = l->trainer->act(learner_obs(*l, obs), noise);
    for (std::size_t i = 0; i < l->count; ++i) {
      actions[l->first + i] = {static_cast<double>(a[2 * i]), static_cast<double>(a[2 * i + 1])};
      assigned[l->first + i] = true;
    }
    if (learner_actions) learner_actions->push_back(a);
  }
  if (scenario_.kind == env::ScenarioKind::predator_prey && !prey_learns(cfg_)) {
    const std::size_t first = scenario_.first_of_type(1);
    if (fixed_prey_.empty()) {
      const auto scripted = env::scripted_prey_actions(state);
      for (std::size_t i = 0; i < scripted.size(); ++i) actions[first + i] = scripted[i];
    } else {
      nd::NoGradGuard guard;
      for (std::size_t i = 0; i < fixed_prey_.size(); ++i) {
        const auto& o = obs[first + i];
        const nd::Tensor<float> x({1, o.size()}, std::vector<float>(o.begin(), o.end()));
        const auto a = fixed_prey_[i]->forward(x);
        actions[first + i] = {static_cast<double>(a.data()[0]), static_cast<double>(a.data()[1])};
      }
    }
    for (std::size_t i = 0; i < scenario_.agents_of_type(1); ++i) assigned[first + i] = true;
  }
  for (bool a : assigned)
    if (!a) throw nd::ContractError("experiment: an agent has no policy");
  return actions;
}

EpisodeResult Experiment::collect_episode() {
  auto state = env::reset(scenario_, streams_.env());
  auto obs = env::observe_all(state);
  EpisodeResult result;
  result.type_rewards.assign(scenario_.type_count(), 0.0);
  std::vector<std::vector<float>> acts;
  for (bool done = false; !done;) {
    const auto actions = joint_actions(state, obs, &streams_.exploration, &acts);
    auto step = env::step(state, actions);
    for (std::size_t k = 0; k < learners_.size(); ++k) {
      auto& l = *learners_[k];
      if (!l.buffer) continue;
      algo::Transition<float> t;
      t.obs = learner_obs(l, obs);
      t.actions = acts[k];
      t.reward = static_cast<float>(step.rewards[l.type]);
      t.next_obs = learner_obs(l, step.observations);
      t.done = step.done;
      l.buffer->push(t);
    }
    for (std::size_t t = 0; t < result.type_rewards.size(); ++t) result.type_rewards[t] += step.rewards[t];
    obs = std::move(step.observations);
    done = step.done;
    ++result.steps;
  }
  return result;
}

std::optional<algo::UpdateStats> Experiment::update_after(std::uint64_t episode) {
  const auto decision = scheduler_.on_episode_end(episode);
  if (!decision.critic) return std::nullopt;
  std::optional<algo::UpdateStats> total;
  std::size_t updated = 0;
  for (auto& l : learners_) {
    if (!l->buffer || l->buffer->size() < cfg_.train.batch_size) continue;
    const auto batch = l->buffer->sample(cfg_.train.batch_size, streams_.buffer);
    const auto s = l->trainer->update(batch, streams_.target_noise, decision.policy);
    if (!total) total.emplace();
    total->critic_loss += s.critic_loss;
    total->policy_updated = total->policy_updated || s.policy_updated;
    total->policy_loss += s.policy_loss;
    total->actor_grad_norms.insert(total->actor_grad_norms.end(), s.actor_grad_norms.begin(),
                                   s.actor_grad_norms.end());
    ++updated;
  }
  if (total) {
    total->critic_loss /= static_cast<double>(updated);
    total->policy_loss /= static_cast<double>(updated);
  }
  return total;
}

EpisodeResult Experiment::greedy_episode(std::uint64_t reset_seed) const {
  auto state = env::reset(scenario_, reset_seed);
  auto obs = env::observe_all(state);
  EpisodeResult result;
  result.type_rewards.assign(scenario_.type_count(), 0.0);
  for (bool done = false; !done;) {
    auto step = env::step(state, joint_actions(state, obs, nullptr, nullptr));
    for (std::size_t t = 0; t < result.type_rewards.size(); ++t) result.type_rewards[t] += step.rewards[t];
    obs = std::move(step.observations);
    done = step.done;
    ++result.steps;
  }
  return result;
}

EvalStats Experiment::evaluate(std::uint64_t episodes, std::uint64_t seed) const {
  auto rng = stream(seed, "evaluation");
  const std::size_t types = scenario_.type_count();
  std::vector<std::vector<double>> rewards(types);
  for (std::uint64_t e = 0; e < episodes; ++e) {
    const auto r = greedy_episode(rng());
    for (std::size_t t = 0; t < types; ++t) rewards[t].push_back(r.type_rewards[t]);
  }
  EvalStats stats;
  stats.episodes = episodes;
  for (const auto& v : rewards) {
    const double n = static_cast<double>(std::max<std::size_t>(v.size(), 1));
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double sq = 0.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    stats.mean.push_back(mean);
    stats.std.push_back(std::sqrt(sq / n));
  }
  return stats;
}

std::vector<nets::NamedTensor<float>> Experiment::named_tensors(bool policies_only) const {
  std::vector<nets::NamedTensor<float>> out;
  for (const auto& l : learners_) {
    for (auto& t : l->trainer->named_tensors(policies_only)) {
      out.push_back({type_prefix(l->type) + t.name, t.tensor});
    }
  }
  return out;
}

void Experiment::save(const fs::path& dir, std::uint64_t episode) const {
  nets::CheckpointManifest meta;
  meta.algo = std::string(algo::algo_name(cfg_.algo));
  meta.scenario = std::string(env::scenario_name(cfg_.scenario));
  meta.agents = cfg_.agents;
  meta.episode = episode;
  nets::save_checkpoint(dir, meta, named_tensors(false));
  write_text(dir / "config.txt", to_config_text(cfg_));
}

void Experiment::restore(const nets::Checkpoint& ck, bool policies_only) {
  const auto& m = ck.manifest;
  if (m.scenario != env::scenario_name(cfg_.scenario) || m.agents != cfg_.agents ||
      m.algo != algo::algo_name(cfg_.algo)) {
    throw nets::LoadError("checkpoint is for " + m.algo + " on " + m.scenario + " with " + std::to_string(m.agents) +
                          " agents, expected " + std::string(algo::algo_name(cfg_.algo)) + " on " +
                          std::string(env::scenario_name(cfg_.scenario)) + " with " + std::to_string(cfg_.agents));
  }
  for (auto& t : named_tensors(policies_only)) {
    const auto* src = ck.find(t.name);
    if (!src) throw nets::LoadError("checkpoint has no tensor '" + t.name + "'");
    if (src->shape() != t.tensor.shape()) throw nets::LoadError("checkpoint tensor '" + t.name + "' has another shape");
    std::copy(src->data().begin(), src->data().end(), t.tensor.mutable_data().begin());
  }
}

TrainSummary train(const RunConfig& cfg, std::ostream* log) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  Experiment exp(cfg, true);
  TrainSummary summary;
  summary.dir = cfg.out;
  fs::create_directories(cfg.out);
  write_text(cfg.out / "config.txt", to_config_text(cfg));
  MetricsWriter metrics(cfg.out / "metrics.csv", cfg.flush_interval);
  std::unique_ptr<std::ofstream> eval_out;
  if (cfg.eval_interval > 0) {
    eval_out = std::make_unique<std::ofstream>(cfg.out / "eval.csv");
    *eval_out << "episode,mean_type0,std_type0,mean_type1,std_type1\n";
  }

  const std::size_t types = exp.scenario().type_count();
  std::vector<RollingMean> smooth(types, RollingMean(cfg.smoothing_window));
  for (std::uint64_t episode = 0; episode < cfg.episodes; ++episode) {
    const auto result = exp.collect_episode();
    summary.env_steps += result.steps;
    std::optional<algo::UpdateStats> stats;
    try {
      stats = exp.update_after(episode);
    } catch (const nd::NumericError& e) {
      metrics.flush();
      summary.aborted = true;
      summary.error = "episode " + std::to_string(episode) + ": " + e.what();
      write_text(cfg.out / "error.txt", summary.error + "\n");
      if (log) *log << "aborted: " << summary.error << '\n';
      break;
    }

    MetricsRecord r;
    r.episode = episode;
    r.env_steps = summary.env_steps;
    r.wall_s = elapsed();
    r.reward_type0 = result.type_rewards[0];
    r.smoothed_type0 = smooth[0].push(result.type_rewards[0]);
    if (types > 1) {
      r.reward_type1 = result.type_rewards[1];
      r.smoothed_type1 = smooth[1].push(result.type_rewards[1]);
    }
    if (stats) {
      r.critic_loss = stats->critic_loss;
      if (stats->policy_updated) r.actor_grad_norm = stats->actor_grad_norms;
    }
    metrics.append(r);
    summary.episodes = episode + 1;

    const std::uint64_t done = episode + 1;
    if (eval_out && done % cfg.eval_interval == 0) {
      const auto ev = exp.evaluate(cfg.eval_episodes, cfg.seed + done);
      *eval_out << done << ',' << format_double(ev.mean[0]) << ',' << format_double(ev.std[0]) << ',';
      if (types > 1) *eval_out << format_double(ev.mean[1]) << ',' << format_double(ev.std[1]);
      else *eval_out << ',';
      *eval_out << '\n' << std::flush;
    }
    if (cfg.checkpoint_interval > 0 && done % cfg.checkpoint_interval == 0 && done < cfg.episodes) {
      exp.save(cfg.out / "checkpoints" / ("episode_" + std::to_string(done)), done);
    }
    if (log && done % 1000 == 0) {
      *log << "episode " << done << "/" << cfg.episodes << " smoothed " << *r.smoothed_type0 << " wall "
           << r.wall_s << "s\n"
           << std::flush;
    }
  }
  metrics.flush();
  if (!summary.aborted) exp.save(cfg.out / "checkpoints" / "final", summary.episodes);
  summary.critic_updates = exp.scheduler().critic_updates();
  summary.policy_updates = exp.scheduler().policy_updates();
  summary.wall_s = elapsed();
  return summary;
}

RunConfig checkpoint_config(const fs::path& checkpoint) {
  return resolve_config(read_config_file(checkpoint / "config.txt"));
}

EvalStats evaluate_checkpoint(const RunConfig& cfg, const fs::path& checkpoint, std::uint64_t episodes,
                              std::uint64_t seed) {
  Experiment exp(cfg, false);
  exp.restore(nets::load_checkpoint(checkpoint), true);
  return exp.evaluate(episodes, seed);
}

}  // namespace samarl::harness

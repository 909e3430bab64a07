#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "samarl/algo/replay_buffer.hpp"
#include "samarl/algo/scheduler.hpp"
#include "samarl/algo/trainer.hpp"
#include "samarl/env/scenario.hpp"
#include "samarl/env/world.hpp"
#include "samarl/harness/run_config.hpp"
#include "samarl/harness/seeding.hpp"
#include "samarl/nets/checkpoint.hpp"

namespace samarl::harness {

struct EpisodeResult {
  std::vector<double> type_rewards;  // summed over the episode, one per agent type
  std::uint64_t steps = 0;
};

struct EvalStats {
  std::vector<double> mean;  // per agent type
  std::vector<double> std;   // population standard deviation, per agent type
  std::uint64_t episodes = 0;
};

/// Networks, buffers and generators of one run. Agent types that learn each
/// own a trainer and a buffer; in predator-prey the prey may instead follow the
/// scripted policy or fixed actors loaded from a checkpoint.
class Experiment {
 public:
  /// `training` allocates replay buffers; evaluation-only instances skip them.
  explicit Experiment(RunConfig cfg, bool training = true);
  ~Experiment();
  Experiment(const Experiment&) = delete;
  Experiment& operator=(const Experiment&) = delete;

  const RunConfig& config() const { return cfg_; }
  const env::ScenarioConfig& scenario() const { return scenario_; }
  std::size_t learner_count() const { return learners_.size(); }
  /// Agent type trained by learner k.
  std::size_t learner_type(std::size_t k) const;
  algo::Trainer<float>& trainer(std::size_t k);
  const algo::ReplayBuffer<float>& buffer(std::size_t k) const;
  const algo::UpdateScheduler& scheduler() const { return scheduler_; }

  /// One exploring episode whose transitions go to the buffers.
  EpisodeResult collect_episode();
  /// Scheduler decision for the finished episode, then one update per learner
  /// with a full batch available. Empty when nothing was updated.
  std::optional<algo::UpdateStats> update_after(std::uint64_t episode);

  /// Noise-free episodes from a fresh generator; no buffer or network changes.
  EvalStats evaluate(std::uint64_t episodes, std::uint64_t seed) const;
  /// One noise-free episode from a given reset seed.
  EpisodeResult greedy_episode(std::uint64_t reset_seed) const;

  /// Learner parameters prefixed "type{t}.".
  std::vector<nets::NamedTensor<float>> named_tensors(bool policies_only = false) const;
  void save(const std::filesystem::path& dir, std::uint64_t episode) const;
  /// Copies parameters from a checkpoint. Throws nets::LoadError when the
  /// manifest's scenario, agent count or algorithm differ, or a tensor is missing.
  void restore(const nets::Checkpoint& checkpoint, bool policies_only);

 private:
  struct Learner;

  std::vector<env::Vec2> joint_actions(const env::WorldState& state, const std::vector<std::vector<double>>& obs,
                                       std::mt19937_64* noise, std::vector<std::vector<float>>* learner_actions) const;
  std::vector<float> learner_obs(const Learner& l, const std::vector<std::vector<double>>& obs) const;

  RunConfig cfg_;
  env::ScenarioConfig scenario_;
  SeedStreams streams_;
  std::vector<std::unique_ptr<Learner>> learners_;
  std::vector<std::unique_ptr<nets::Actor<float>>> fixed_prey_;
  algo::UpdateScheduler scheduler_;
};

struct TrainSummary {
  std::filesystem::path dir;
  std::uint64_t episodes = 0;
  std::uint64_t env_steps = 0;
  std::uint64_t critic_updates = 0;
  std::uint64_t policy_updates = 0;
  double wall_s = 0.0;
  bool aborted = false;
  std::string error;
};

/// Full training run into cfg.out: config.txt, metrics.csv, eval.csv (when
/// enabled), checkpoints/episode_<E> every checkpoint_interval episodes and
/// checkpoints/final. A non-finite loss stops the run with every metrics row
/// written so far flushed, and the message in error.txt.
TrainSummary train(const RunConfig& cfg, std::ostream* log = nullptr);

/// Loads a checkpoint written by `train` into networks built from `cfg`, then evaluates.
EvalStats evaluate_checkpoint(const RunConfig& cfg, const std::filesystem::path& checkpoint, std::uint64_t episodes,
                              std::uint64_t seed);

/// The run config stored next to a checkpoint.
RunConfig checkpoint_config(const std::filesystem::path& checkpoint);

}  // namespace samarl::harness

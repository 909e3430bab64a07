#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace samarl::env {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ScenarioKind { cooperative_navigation, predator_prey };

std::string_view scenario_name(ScenarioKind kind);
/// Accepts "coop_nav" / "predator_prey"; throws ConfigError otherwise.
ScenarioKind parse_scenario(std::string_view name);

struct BodyParams {
  double radius = 0.05;
  double mass = 1.0;
  double accel = 5.0;
  double max_speed = 1.0;
};

/// Everything that defines a scenario instance. Constants follow the
/// conventional particle-world values; all of them can be overridden.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::cooperative_navigation;
  std::size_t agents = 3;     // all movable agents (predators + prey for predator-prey)
  std::size_t landmarks = 3;  // landmarks (coop-nav) or obstacles (predator-prey)
  std::size_t prey = 0;       // predator-prey only

  double world_half_width = 1.0;
  double dt = 0.1;
  double damping = 0.25;
  double contact_stiffness = 100.0;
  double contact_margin = 1e-3;
  std::size_t episode_length = 20;

  double collision_penalty = 1.0;  // coop-nav, per colliding agent
  double catch_reward = 10.0;      // predator-prey, per contact
  double boundary_start = 0.9;     // prey boundary penalty onset
  double boundary_slope = 10.0;
  double boundary_cap = 10.0;

  BodyParams agent{0.15, 1.0, 5.0, 1.0};
  BodyParams predator{0.075, 1.0, 3.0, 1.0};
  BodyParams prey_body{0.05, 1.0, 4.0, 1.3};
  double landmark_radius = 0.05;
  double obstacle_radius = 0.2;
  double landmark_spawn = 0.9;

  double prey_sense_range = 1.2;
  double prey_wall_margin = 0.8;
  double prey_obstacle_clearance = 0.1;

  std::size_t predators() const { return kind == ScenarioKind::predator_prey ? agents - prey : 0; }
  /// Agent types: coop-nav has one, predator-prey has predators (0) and prey (1).
  std::size_t type_count() const { return kind == ScenarioKind::predator_prey ? 2 : 1; }
  std::size_t agent_type(std::size_t agent) const;
  std::size_t agents_of_type(std::size_t type) const;
  /// Index of the first agent of a type; agents of one type are contiguous.
  std::size_t first_of_type(std::size_t type) const;
  std::size_t obs_dim(std::size_t type) const;
  static constexpr std::size_t act_dim = 2;
};

/// Coop-nav: N agents and N landmarks, N in {3, 5, 8} unless `allow_any_count`.
/// Predator-prey: N total in {3, 6, 9}, predators = 2 x prey, 3 obstacles.
ScenarioConfig make_scenario(ScenarioKind kind, std::size_t agents, bool allow_any_count = false);

/// Throws ConfigError naming the violated rule.
void validate(const ScenarioConfig& cfg, bool allow_any_count = false);

}  // namespace samarl::env

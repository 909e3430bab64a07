#include "samarl/env/scenario.hpp"

namespace samarl::env {

std::string_view scenario_name(ScenarioKind kind) {
  return kind == ScenarioKind::predator_prey ? "predator_prey" : "coop_nav";
}

ScenarioKind parse_scenario(std::string_view name) {
  if (name == "coop_nav" || name == "cooperative_navigation") return ScenarioKind::cooperative_navigation;
  if (name == "predator_prey") return ScenarioKind::predator_prey;
  throw ConfigError("unknown scenario '" + std::string(name) + "' (expected coop_nav or predator_prey)");
}

std::size_t ScenarioConfig::agent_type(std::size_t agent) const {
  if (agent >= agents) throw ConfigError("agent index " + std::to_string(agent) + " out of range");
  return kind == ScenarioKind::predator_prey && agent >= predators() ? 1 : 0;
}

std::size_t ScenarioConfig::agents_of_type(std::size_t type) const {
  if (kind != ScenarioKind::predator_prey) return type == 0 ? agents : 0;
  return type == 0 ? predators() : (type == 1 ? prey : 0);
}

std::size_t ScenarioConfig::first_of_type(std::size_t type) const { return type == 0 ? 0 : predators(); }

std::size_t ScenarioConfig::obs_dim(std::size_t type) const {
  // own velocity + own position + landmark offsets + other-agent offsets
  std::size_t dim = 4 + 2 * landmarks + 2 * (agents - 1);
  if (kind == ScenarioKind::predator_prey) dim += 2 * agents_of_type(1 - type);
  return dim;
}

void validate(const ScenarioConfig& cfg, bool allow_any_count) {
  auto fail = [](const std::string& msg) { throw ConfigError("invalid scenario: " + msg); };
  if (cfg.agents == 0) fail("no agents");
  if (!(cfg.dt > 0)) fail("dt must be positive");
  if (!(cfg.damping >= 0 && cfg.damping < 1)) fail("damping must lie in [0, 1)");
  if (cfg.episode_length == 0) fail("episode length must be positive");
  for (const auto* b : {&cfg.agent, &cfg.predator, &cfg.prey_body}) {
    if (!(b->radius > 0) || !(b->mass > 0) || !(b->max_speed > 0)) fail("body radius, mass and max_speed must be positive");
  }
  if (cfg.kind == ScenarioKind::cooperative_navigation) {
    if (cfg.landmarks != cfg.agents) fail("cooperative navigation needs as many landmarks as agents");
    if (cfg.prey != 0) fail("cooperative navigation has no prey");
    if (!allow_any_count && cfg.agents != 3 && cfg.agents != 5 && cfg.agents != 8)
      fail("cooperative navigation supports 3, 5 or 8 agents, got " + std::to_string(cfg.agents));
  } else {
    if (cfg.prey == 0 || cfg.agents != 3 * cfg.prey) fail("predator-prey needs predators = 2 x prey");
    if (cfg.landmarks != 3) fail("predator-prey uses 3 obstacles");
    if (!allow_any_count && cfg.agents != 3 && cfg.agents != 6 && cfg.agents != 9)
      fail("predator-prey supports 3, 6 or 9 agents, got " + std::to_string(cfg.agents));
  }
}

ScenarioConfig make_scenario(ScenarioKind kind, std::size_t agents, bool allow_any_count) {
  ScenarioConfig cfg;
  cfg.kind = kind;
  cfg.agents = agents;
  if (kind == ScenarioKind::cooperative_navigation) {
    cfg.landmarks = agents;
  } else {
    cfg.landmarks = 3;
    cfg.prey = agents / 3;
  }
  validate(cfg, allow_any_count);
  return cfg;
}

}  // namespace samarl::env

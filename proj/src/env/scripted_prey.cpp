#include "samarl/env/scripted_prey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace samarl::env {

Vec2 scripted_prey(const WorldState& state, std::size_t prey_index) {
  const auto& cfg = state.cfg;
  if (cfg.kind != ScenarioKind::predator_prey) throw std::logic_error("scripted_prey needs a predator-prey world");
  if (prey_index >= cfg.prey) throw std::out_of_range("prey index " + std::to_string(prey_index) + " out of range");
  const Body& self = state.agent(cfg.predators() + prey_index);

  double nearest = std::numeric_limits<double>::infinity();
  Vec2 threat;
  for (std::size_t q = 0; q < cfg.predators(); ++q) {
    const double d = norm(self.pos - state.agent(q).pos);
    if (d < nearest) {
      nearest = d;
      threat = state.agent(q).pos;
    }
  }
  if (!(nearest <= cfg.prey_sense_range)) return {0.0, 0.0};

  const Vec2 away = self.pos - threat;
  Vec2 action = nearest > 0.0 ? away * (1.0 / nearest) : Vec2{1.0, 0.0};

  const double edge = cfg.world_half_width;
  const double margin = cfg.prey_wall_margin * edge;
  for (auto [p, a] : {std::pair{self.pos.x, &action.x}, std::pair{self.pos.y, &action.y}}) {
    const double excess = std::abs(p) - margin;
    if (excess > 0.0) *a -= std::copysign(excess / (edge - margin), p);
  }

  for (std::size_t l = 0; l < cfg.landmarks; ++l) {
    const Body& obstacle = state.landmark(l);
    const Vec2 delta = self.pos - obstacle.pos;
    const double d = norm(delta);
    const double reach = obstacle.radius + self.radius + cfg.prey_obstacle_clearance;
    if (d < reach && d > 0.0) action = action + delta * ((reach - d) / (reach * d));
  }
  return {std::clamp(action.x, -1.0, 1.0), std::clamp(action.y, -1.0, 1.0)};
}

std::vector<Vec2> scripted_prey_actions(const WorldState& state) {
  std::vector<Vec2> out;
  for (std::size_t p = 0; p < state.cfg.prey; ++p) out.push_back(scripted_prey(state, p));
  return out;
}

}  // namespace samarl::env

#include "samarl/env/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace samarl::env {

double norm(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }

namespace {

Body make_agent(const BodyParams& p, Role role) {
  Body b;
  b.radius = p.radius;
  b.mass = p.mass;
  b.accel = p.accel;
  b.max_speed = p.max_speed;
  b.movable = true;
  b.collide = true;
  b.role = role;
  return b;
}

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

}  // namespace

WorldState reset(const ScenarioConfig& cfg, std::uint64_t seed) {
  validate(cfg, true);
  WorldState s;
  s.cfg = cfg;
  s.rng.seed(seed);
  const bool pp = cfg.kind == ScenarioKind::predator_prey;
  for (std::size_t i = 0; i < cfg.agents; ++i) {
    if (!pp) {
      s.bodies.push_back(make_agent(cfg.agent, Role::agent));
    } else if (i < cfg.predators()) {
      s.bodies.push_back(make_agent(cfg.predator, Role::predator));
    } else {
      s.bodies.push_back(make_agent(cfg.prey_body, Role::prey));
    }
  }
  for (std::size_t l = 0; l < cfg.landmarks; ++l) {
    Body b;
    b.radius = pp ? cfg.obstacle_radius : cfg.landmark_radius;
    b.collide = pp;
    b.role = pp ? Role::obstacle : Role::landmark;
    s.bodies.push_back(b);
  }
  std::uniform_real_distribution<double> agent_pos(-cfg.world_half_width, cfg.world_half_width);
  std::uniform_real_distribution<double> landmark_pos(-cfg.landmark_spawn, cfg.landmark_spawn);
  for (std::size_t i = 0; i < s.bodies.size(); ++i) {
    auto& dist = i < cfg.agents ? agent_pos : landmark_pos;
    const double x = dist(s.rng);
    const double y = dist(s.rng);
    s.bodies[i].pos = {x, y};
  }
  return s;
}

std::vector<Vec2> contact_forces(const WorldState& state) {
  const auto& cfg = state.cfg;
  std::vector<Vec2> forces(state.bodies.size());
  for (std::size_t a = 0; a < state.bodies.size(); ++a) {
    for (std::size_t b = a + 1; b < state.bodies.size(); ++b) {
      const Body& ba = state.bodies[a];
      const Body& bb = state.bodies[b];
      if (!ba.collide || !bb.collide || (!ba.movable && !bb.movable)) continue;
      const Vec2 delta = ba.pos - bb.pos;
      const double dist = norm(delta);
      const double dist_min = ba.radius + bb.radius;
      const double penetration = softplus(-(dist - dist_min) / cfg.contact_margin) * cfg.contact_margin;
      const Vec2 dir = dist > 0.0 ? delta * (1.0 / dist) : Vec2{1.0, 0.0};
      const Vec2 f = dir * (cfg.contact_stiffness * penetration);
      if (ba.movable) forces[a] = forces[a] + f;
      if (bb.movable) forces[b] = forces[b] - f;
    }
  }
  return forces;
}

void integrate(WorldState& state, const std::vector<Vec2>& actions) {
  const auto& cfg = state.cfg;
  const auto contact = contact_forces(state);
  for (std::size_t i = 0; i < state.bodies.size(); ++i) {
    Body& b = state.bodies[i];
    if (!b.movable) continue;
    const Vec2 push = i < actions.size() ? actions[i] : Vec2{};
    const Vec2 force = push * b.accel + contact[i];
    b.vel = b.vel * (1.0 - cfg.damping) + force * (cfg.dt / b.mass);
    const double speed = norm(b.vel);
    if (speed > b.max_speed) b.vel = b.vel * (b.max_speed / speed);
    b.pos = b.pos + b.vel * cfg.dt;
  }
}

StepResult step(WorldState& state, const std::vector<Vec2>& actions) {
  const auto& cfg = state.cfg;
  if (actions.size() != cfg.agents) {
    throw std::invalid_argument("step: expected " + std::to_string(cfg.agents) + " actions, got " +
                                std::to_string(actions.size()));
  }
  if (state.step >= cfg.episode_length) throw std::logic_error("step: episode already finished");
  std::vector<Vec2> clipped(actions);
  for (auto& a : clipped) {
    for (double* c : {&a.x, &a.y}) {
      if (!std::isfinite(*c)) throw std::invalid_argument("step: non-finite action component");
      if (*c < -1.0 || *c > 1.0) {
        *c = std::clamp(*c, -1.0, 1.0);
        ++state.clipped_action_components;
      }
    }
  }
  integrate(state, clipped);
  ++state.step;
  StepResult r;
  r.observations = observe_all(state);
  r.rewards = rewards(state);
  r.done = state.step == cfg.episode_length;
  return r;
}

std::vector<double> observe(const WorldState& state, std::size_t agent) {
  const auto& cfg = state.cfg;
  if (agent >= cfg.agents) throw std::out_of_range("observe: agent " + std::to_string(agent) + " out of range");
  const Body& self = state.bodies[agent];
  std::vector<double> obs;
  obs.reserve(cfg.obs_dim(cfg.agent_type(agent)));
  obs.insert(obs.end(), {self.vel.x, self.vel.y, self.pos.x, self.pos.y});
  for (std::size_t l = 0; l < cfg.landmarks; ++l) {
    const Vec2 rel = state.landmark(l).pos - self.pos;
    obs.insert(obs.end(), {rel.x, rel.y});
  }
  for (std::size_t j = 0; j < cfg.agents; ++j) {
    if (j == agent) continue;
    const Vec2 rel = state.bodies[j].pos - self.pos;
    obs.insert(obs.end(), {rel.x, rel.y});
  }
  if (cfg.kind == ScenarioKind::predator_prey) {
    const std::size_t other = 1 - cfg.agent_type(agent);
    const std::size_t first = cfg.first_of_type(other);
    for (std::size_t j = first; j < first + cfg.agents_of_type(other); ++j)
      obs.insert(obs.end(), {state.bodies[j].vel.x, state.bodies[j].vel.y});
  }
  return obs;
}

std::vector<std::vector<double>> observe_all(const WorldState& state) {
  std::vector<std::vector<double>> out;
  out.reserve(state.cfg.agents);
  for (std::size_t i = 0; i < state.cfg.agents; ++i) out.push_back(observe(state, i));
  return out;
}

bool overlapping(const Body& a, const Body& b) { return norm(a.pos - b.pos) < a.radius + b.radius; }

double reward_coop_nav(const WorldState& state) {
  const auto& cfg = state.cfg;
  double r = 0.0;
  for (std::size_t l = 0; l < cfg.landmarks; ++l) {
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.agents; ++i) closest = std::min(closest, norm(state.agent(i).pos - state.landmark(l).pos));
    r -= closest;
  }
  for (std::size_t i = 0; i < cfg.agents; ++i)
    for (std::size_t j = 0; j < cfg.agents; ++j)
      if (i != j && overlapping(state.agent(i), state.agent(j))) r -= cfg.collision_penalty;
  return r;
}

double boundary_penalty(const ScenarioConfig& cfg, double coordinate) {
  const double x = std::abs(coordinate);
  const double edge = cfg.world_half_width;
  if (x < cfg.boundary_start * edge) return 0.0;
  if (x < edge) return (x - cfg.boundary_start * edge) * cfg.boundary_slope;
  return std::min(std::exp(2.0 * x - 2.0 * edge), cfg.boundary_cap);
}

PredatorPreyReward reward_predator_prey(const WorldState& state) {
  const auto& cfg = state.cfg;
  PredatorPreyReward r;
  for (std::size_t p = cfg.predators(); p < cfg.agents; ++p) {
    for (std::size_t q = 0; q < cfg.predators(); ++q) {
      if (overlapping(state.agent(p), state.agent(q))) {
        r.predators += cfg.catch_reward;
        r.prey -= cfg.catch_reward;
      }
    }
    r.prey -= boundary_penalty(cfg, state.agent(p).pos.x) + boundary_penalty(cfg, state.agent(p).pos.y);
  }
  return r;
}

std::vector<double> rewards(const WorldState& state) {
  if (state.cfg.kind == ScenarioKind::cooperative_navigation) return {reward_coop_nav(state)};
  const auto r = reward_predator_prey(state);
  return {r.predators, r.prey};
}

}  // namespace samarl::env

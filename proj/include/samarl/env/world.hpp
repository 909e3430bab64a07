#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "samarl/env/scenario.hpp"

namespace samarl::env {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

double norm(Vec2 v);

enum class Role { agent, predator, prey, landmark, obstacle };

struct Body {
  Vec2 pos;
  Vec2 vel;
  double radius = 0.05;
  double mass = 1.0;
  double accel = 0.0;
  double max_speed = 0.0;
  bool movable = false;
  bool collide = false;
  Role role = Role::landmark;
};

/// Bodies are ordered: agents (predators before prey), then landmarks/obstacles.
struct WorldState {
  ScenarioConfig cfg;
  std::vector<Body> bodies;
  std::size_t step = 0;
  std::uint64_t clipped_action_components = 0;
  std::mt19937_64 rng;

  const Body& agent(std::size_t i) const { return bodies[i]; }
  const Body& landmark(std::size_t l) const { return bodies[cfg.agents + l]; }
};

struct StepResult {
  std::vector<std::vector<double>> observations;  // one per agent
  std::vector<double> rewards;                    // one per agent type
  bool done = false;
};

/// Places agents uniformly in the world square and landmarks slightly inside it.
WorldState reset(const ScenarioConfig& cfg, std::uint64_t seed);

/// Advances one step. `actions` holds one force per agent; components outside
/// [-1, 1] are clipped and counted. Throws std::invalid_argument on a wrong
/// action count or non-finite component, and std::logic_error past episode end.
StepResult step(WorldState& state, const std::vector<Vec2>& actions);

/// Physics only: contact forces, damping, speed cap, position update.
void integrate(WorldState& state, const std::vector<Vec2>& actions);

/// Per-body contact forces (zero for bodies that do not collide).
std::vector<Vec2> contact_forces(const WorldState& state);

/// Layout: own velocity, own position, landmark offsets (landmark - self),
/// other-agent offsets in index order skipping self, then for predator-prey the
/// velocities of every agent of the opposite type.
std::vector<double> observe(const WorldState& state, std::size_t agent);
std::vector<std::vector<double>> observe_all(const WorldState& state);

bool overlapping(const Body& a, const Body& b);

/// Minus the summed closest-agent distance per landmark, minus the collision
/// penalty once per agent per other agent it overlaps.
double reward_coop_nav(const WorldState& state);

struct PredatorPreyReward {
  double predators = 0.0;
  double prey = 0.0;
};
PredatorPreyReward reward_predator_prey(const WorldState& state);

/// Out-of-bounds penalty for a single coordinate magnitude.
double boundary_penalty(const ScenarioConfig& cfg, double coordinate);

std::vector<double> rewards(const WorldState& state);

}  // namespace samarl::env

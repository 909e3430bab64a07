#pragma once

#include <vector>

#include "samarl/env/world.hpp"

namespace samarl::env {

/// Flee heuristic for one prey (index counted among prey, from 0). Unit push
/// away from the nearest predator in sensing range, plus per-axis wall
/// repulsion past the wall margin and a push away from nearby obstacles,
/// clipped to [-1, 1]. Returns (0, 0) when no predator is in range.
Vec2 scripted_prey(const WorldState& state, std::size_t prey_index);

/// Actions for every prey, in agent order.
std::vector<Vec2> scripted_prey_actions(const WorldState& state);

}  // namespace samarl::env

#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include "samarl/env/world.hpp"

namespace samarl::env {

/// Comma-separated per-step dump: step,body,x,y,vx,vy,reward. The reward
/// column carries the agent's type reward and is empty for landmarks.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(const std::filesystem::path& path);

  void write(const WorldState& state, const std::vector<double>& type_rewards);

 private:
  std::ofstream out_;
};

}  // namespace samarl::env

#include "samarl/env/trajectory.hpp"

#include <stdexcept>

namespace samarl::env {

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open trajectory file " + path.string());
  out_.precision(9);
  out_ << "step,body,x,y,vx,vy,reward\n";
}

void TrajectoryWriter::write(const WorldState& state, const std::vector<double>& type_rewards) {
  for (std::size_t i = 0; i < state.bodies.size(); ++i) {
    const Body& b = state.bodies[i];
    out_ << state.step << ',' << i << ',' << b.pos.x << ',' << b.pos.y << ',' << b.vel.x << ',' << b.vel.y << ',';
    if (i < state.cfg.agents) out_ << type_rewards.at(state.cfg.agent_type(i));
    out_ << '\n';
  }
  if (!out_) throw std::runtime_error("trajectory write failed");
}

}  // namespace samarl::env

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "samarl/env/scenario.hpp"
#include "samarl/env/scripted_prey.hpp"
#include "samarl/env/trajectory.hpp"
#include "samarl/env/world.hpp"
#include "physics_oracle.hpp"

using namespace samarl::env;
using namespace physics_oracle;

namespace {

WorldState single_body_world(Vec2 pos = {}, Vec2 vel = {}) {
  auto cfg = make_scenario(ScenarioKind::cooperative_navigation, 1, true);
  auto s = reset(cfg, 1);
  s.bodies[0].pos = pos;
  s.bodies[0].vel = vel;
  s.bodies[1].pos = {0.5, 0.5};
  return s;
}

}  // namespace

TEST(Scenario, CountsFollowScenarioRules) {
  for (std::size_t n : {3u, 5u, 8u}) {
    const auto cfg = make_scenario(ScenarioKind::cooperative_navigation, n);
    const auto s = reset(cfg, 7);
    EXPECT_EQ(s.bodies.size(), 2 * n);
    EXPECT_EQ(cfg.obs_dim(0), 4 * n + 2);
  }
  const auto pp = make_scenario(ScenarioKind::predator_prey, 6);
  EXPECT_EQ(pp.predators(), 4u);
  EXPECT_EQ(pp.prey, 2u);
  EXPECT_EQ(pp.landmarks, 3u);
  const auto s = reset(pp, 3);
  std::size_t predators = 0, prey = 0, obstacles = 0;
  for (const auto& b : s.bodies) {
    predators += b.role == Role::predator;
    prey += b.role == Role::prey;
    obstacles += b.role == Role::obstacle;
  }
  EXPECT_EQ(predators, 4u);
  EXPECT_EQ(prey, 2u);
  EXPECT_EQ(obstacles, 3u);
  for (std::size_t n : {3u, 9u}) EXPECT_NO_THROW(make_scenario(ScenarioKind::predator_prey, n));
}

TEST(Scenario, InvalidCountsAreConfigErrors) {
  EXPECT_THROW(make_scenario(ScenarioKind::cooperative_navigation, 4), ConfigError);
  EXPECT_THROW(make_scenario(ScenarioKind::predator_prey, 5), ConfigError);
  auto cfg = make_scenario(ScenarioKind::cooperative_navigation, 3);
  cfg.landmarks = 2;
  EXPECT_THROW(reset(cfg, 1), ConfigError);
  EXPECT_THROW(parse_scenario("tag"), ConfigError);
  EXPECT_EQ(parse_scenario("predator_prey"), ScenarioKind::predator_prey);
}

TEST(Scenario, PreyFasterThanPredators) {
  const auto cfg = make_scenario(ScenarioKind::predator_prey, 3);
  EXPECT_GT(cfg.prey_body.max_speed, cfg.predator.max_speed);
  EXPECT_GT(cfg.prey_body.accel, cfg.predator.accel);
}

TEST(Reset, SameSeedBitwiseIdenticalAndInBounds) {
  const auto cfg = make_scenario(ScenarioKind::cooperative_navigation, 8);
  const auto a = reset(cfg, 42), b = reset(cfg, 42), c = reset(cfg, 43);
  EXPECT_TRUE(bitwise_equal(a, b));
  EXPECT_FALSE(bitwise_equal(a, c));
  for (std::size_t i = 0; i < a.bodies.size(); ++i) {
    const double lim = i < cfg.agents ? 1.0 : 0.9;
    EXPECT_LE(std::abs(a.bodies[i].pos.x), lim);
    EXPECT_LE(std::abs(a.bodies[i].pos.y), lim);
    EXPECT_EQ(a.bodies[i].vel, (Vec2{0, 0}));
  }
  EXPECT_EQ(a.step, 0u);
}

TEST(Step, HandSteppedIntegration) {
  auto s = single_body_world();
  step(s, {{1.0, 0.0}});
  EXPECT_NEAR(s.bodies[0].vel.x, 0.5, 1e-15);
  EXPECT_EQ(s.bodies[0].vel.y, 0.0);
  EXPECT_NEAR(s.bodies[0].pos.x, 0.05, 1e-15);
  EXPECT_EQ(s.bodies[0].pos.y, 0.0);
}

TEST(Step, ZeroForceDecaysVelocityByThreeQuarters) {
  auto s = single_body_world({0, 0}, {0.4, -0.2});
  step(s, {{0.0, 0.0}});
  EXPECT_DOUBLE_EQ(s.bodies[0].vel.x, 0.3);
  EXPECT_DOUBLE_EQ(s.bodies[0].vel.y, -0.15);
}

TEST(Step, SpeedCapIsExact) {
  auto s = single_body_world({0, 0}, {0.9, 0.6});
  step(s, {{1.0, 1.0}});
  EXPECT_NEAR(norm(s.bodies[0].vel), s.bodies[0].max_speed, 1e-12);
}

TEST(Step, ClipsOutOfRangeActionsAndCounts) {
  auto a = single_body_world(), b = single_body_world();
  step(a, {{3.0, -2.0}});
  step(b, {{1.0, -1.0}});
  EXPECT_TRUE(bitwise_equal(a, b));
  EXPECT_EQ(a.clipped_action_components, 2u);
  EXPECT_EQ(b.clipped_action_components, 0u);
  EXPECT_THROW(step(a, {}), std::invalid_argument);
  EXPECT_THROW(step(a, {{std::nan(""), 0.0}}), std::invalid_argument);
}

TEST(Step, DoneExactlyAtTwenty) {
  const auto cfg = make_scenario(ScenarioKind::predator_prey, 6);
  auto s = reset(cfg, 5);
  std::mt19937_64 rng(1);
  for (int t = 1; t <= 20; ++t) {
    const auto r = step(s, random_actions(cfg.agents, rng));
    EXPECT_EQ(r.done, t == 20) << "t=" << t;
  }
  EXPECT_THROW(step(s, random_actions(cfg.agents, rng)), std::logic_error);
}

TEST(Step, SpeedCapHoldsForEveryBody) {
  for (auto kind : {ScenarioKind::cooperative_navigation, ScenarioKind::predator_prey}) {
    const auto cfg = make_scenario(kind, kind == ScenarioKind::predator_prey ? 9 : 8);
    std::mt19937_64 rng(11);
    for (int ep = 0; ep < 20; ++ep) {
      auto s = reset(cfg, ep);
      for (int t = 0; t < 20; ++t) {
        step(s, random_actions(cfg.agents, rng));
        for (const auto& b : s.bodies)
          if (b.movable) {
            ASSERT_LE(norm(b.vel), b.max_speed * (1 + 1e-12));
          }
      }
    }
  }
}

TEST(Physics, MatchesIndependentScalarIntegrator) {
  for (auto kind : {ScenarioKind::cooperative_navigation, ScenarioKind::predator_prey}) {
    const auto cfg = make_scenario(kind, kind == ScenarioKind::predator_prey ? 6 : 5);
    auto s = reset(cfg, 2024);
    // Crowd the bodies so contact forces are exercised.
    for (std::size_t i = 0; i < s.bodies.size(); ++i) s.bodies[i].pos = s.bodies[i].pos * 0.3;
    FlatWorld f = flatten(s);
    std::mt19937_64 rng(9);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      if (s.step == cfg.episode_length) s.step = 0;
      const auto actions = random_actions(cfg.agents, rng, 1.3);
      std::vector<double> ax, ay;
      for (const auto& a : actions) {
        ax.push_back(a.x);
        ay.push_back(a.y);
      }
      step(s, actions);
      oracle_step(f, ax, ay, cfg.dt, cfg.damping, cfg.contact_stiffness, cfg.contact_margin);
      for (std::size_t i = 0; i < s.bodies.size(); ++i) {
        worst = std::max({worst, std::abs(s.bodies[i].pos.x - f.px[i]), std::abs(s.bodies[i].pos.y - f.py[i]),
                          std::abs(s.bodies[i].vel.x - f.vx[i]), std::abs(s.bodies[i].vel.y - f.vy[i])});
      }
    }
    EXPECT_LT(worst, 1e-9) << scenario_name(kind);
  }
}

TEST(Physics, DeterministicReplayIsBitwise) {
  const auto cfg = make_scenario(ScenarioKind::predator_prey, 9);
  std::vector<std::vector<double>> rewards_a, rewards_b;
  auto run = [&](std::vector<std::vector<double>>& rewards) {
    auto s = reset(cfg, 77);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) rewards.push_back(step(s, random_actions(cfg.agents, rng)).rewards);
    return s;
  };
  const auto a = run(rewards_a), b = run(rewards_b);
  EXPECT_TRUE(bitwise_equal(a, b));
  EXPECT_EQ(rewards_a, rewards_b);
}

TEST(Physics, OverlappingBodiesArePushedApart) {
  auto cfg = make_scenario(ScenarioKind::cooperative_navigation, 3);
  auto s = reset(cfg, 1);
  s.bodies[0].pos = {0.0, 0.0};
  s.bodies[1].pos = {0.1, 0.0};
  s.bodies[2].pos = {5.0, 5.0};
  step(s, {{0, 0}, {0, 0}, {0, 0}});
  EXPECT_LT(s.bodies[0].vel.x, 0.0);
  EXPECT_GT(s.bodies[1].vel.x, 0.0);
  EXPECT_NEAR(s.bodies[0].vel.x, -s.bodies[1].vel.x, 1e-12);
}

TEST(CoopNavReward, Examples) {
  auto cfg = make_scenario(ScenarioKind::cooperative_navigation, 3);
  auto s = reset(cfg, 1);
  const Vec2 spots[3] = {{-0.6, 0.0}, {0.0, 0.6}, {0.6, 0.0}};
  for (std::size_t i = 0; i < 3; ++i) {
    s.bodies[i].pos = spots[i];
    s.bodies[3 + i].pos = spots[i];
  }
  EXPECT_EQ(reward_coop_nav(s), 0.0);

  auto one = single_body_world({0.0, 0.0});
  one.bodies[1].pos = {0.3, 0.4};
  EXPECT_DOUBLE_EQ(reward_coop_nav(one), -0.5);

  // Agents 0 and 1 overlap far away; agent 2 sits on nothing in particular.
  s.bodies[0].pos = {5.0, 5.0};
  s.bodies[1].pos = {5.1, 5.0};
  s.bodies[2].pos = {-5.0, -5.0};
  double distance = 0.0;
  for (std::size_t l = 0; l < 3; ++l) {
    double best = 1e9;
    for (std::size_t i = 0; i < 3; ++i) best = std::min(best, norm(s.bodies[i].pos - s.bodies[3 + l].pos));
    distance += best;
  }
  EXPECT_DOUBLE_EQ(reward_coop_nav(s), -distance - 2.0);
}

TEST(PredatorPreyReward, Examples) {
  const auto cfg = make_scenario(ScenarioKind::predator_prey, 3);
  auto s = reset(cfg, 1);
  s.bodies[0].pos = {-0.5, -0.5};
  s.bodies[1].pos = {-0.5, 0.5};
  s.bodies[2].pos = {0.5, 0.0};
  for (std::size_t l = 0; l < 3; ++l) s.bodies[3 + l].pos = {0.0, -0.8 + 0.1 * l};
  auto r = reward_predator_prey(s);
  EXPECT_EQ(r.predators, 0.0);
  EXPECT_EQ(r.prey, 0.0);

  s.bodies[0].pos = {0.55, 0.0};
  r = reward_predator_prey(s);
  EXPECT_EQ(r.predators, 10.0);
  EXPECT_EQ(r.prey, -10.0);
  EXPECT_EQ(rewards(s), (std::vector<double>{10.0, -10.0}));

  s.bodies[0].pos = {-0.5, -0.5};
  s.bodies[2].pos = {1.0 + 1e-6, 0.0};
  r = reward_predator_prey(s);
  EXPECT_LT(r.prey, 0.0);
  EXPECT_EQ(r.predators, 0.0);
}

TEST(PredatorPreyReward, BoundaryPenaltyShape) {
  const auto cfg = make_scenario(ScenarioKind::predator_prey, 3);
  EXPECT_EQ(boundary_penalty(cfg, 0.5), 0.0);
  EXPECT_NEAR(boundary_penalty(cfg, 0.95), 0.5, 1e-12);
  EXPECT_NEAR(boundary_penalty(cfg, -1.2), std::exp(0.4), 1e-12);
  EXPECT_EQ(boundary_penalty(cfg, 5.0), 10.0);
}

TEST(Reward, SameTypeAgentsShareValue) {
  const auto cfg = make_scenario(ScenarioKind::predator_prey, 9);
  auto s = reset(cfg, 4);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto r = step(s, random_actions(cfg.agents, rng));
    ASSERT_EQ(r.rewards.size(), cfg.type_count());
  }
}

TEST(Observe, LayoutAndRelativeOffsets) {
  auto cfg = make_scenario(ScenarioKind::cooperative_navigation, 3);
  auto s = reset(cfg, 1);
  s.bodies[0].pos = {0, 0};
  s.bodies[0].vel = {0.1, -0.2};
  s.bodies[3].pos = {1, 2};
  const auto o = observe(s, 0);
  ASSERT_EQ(o.size(), cfg.obs_dim(0));
  EXPECT_EQ(o[0], 0.1);
  EXPECT_EQ(o[1], -0.2);
  EXPECT_EQ(o[4], 1.0);
  EXPECT_EQ(o[5], 2.0);
  const auto pp = make_scenario(ScenarioKind::predator_prey, 6);
  const auto t = reset(pp, 2);
  EXPECT_EQ(observe(t, 0).size(), pp.obs_dim(0));
  EXPECT_EQ(observe(t, 5).size(), pp.obs_dim(1));
  EXPECT_EQ(pp.obs_dim(0), 4u + 6 + 10 + 4);
  EXPECT_EQ(pp.obs_dim(1), 4u + 6 + 10 + 8);
}

TEST(Observe, JointObservationsReconstructState) {
  for (auto kind : {ScenarioKind::cooperative_navigation, ScenarioKind::predator_prey}) {
    const auto cfg = make_scenario(kind, 6 + (kind == ScenarioKind::cooperative_navigation ? 2 : 0));
    auto s = reset(cfg, 3);
    std::mt19937_64 rng(8);
    for (int t = 0; t < 5; ++t) step(s, random_actions(cfg.agents, rng));
    const auto obs = observe_all(s);
    for (std::size_t i = 0; i < cfg.agents; ++i) {
      EXPECT_EQ(obs[i][0], s.bodies[i].vel.x);
      EXPECT_EQ(obs[i][1], s.bodies[i].vel.y);
      EXPECT_EQ(obs[i][2], s.bodies[i].pos.x);
      EXPECT_EQ(obs[i][3], s.bodies[i].pos.y);
      for (std::size_t l = 0; l < cfg.landmarks; ++l) {
        EXPECT_NEAR(obs[i][4 + 2 * l] + obs[i][2], s.landmark(l).pos.x, 1e-12);
        EXPECT_NEAR(obs[i][5 + 2 * l] + obs[i][3], s.landmark(l).pos.y, 1e-12);
      }
    }
  }
}

TEST(Observe, LengthConstantAcrossSteps) {
  const auto cfg = make_scenario(ScenarioKind::predator_prey, 9);
  auto s = reset(cfg, 1);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto r = step(s, random_actions(cfg.agents, rng));
    for (std::size_t i = 0; i < cfg.agents; ++i) ASSERT_EQ(r.observations[i].size(), cfg.obs_dim(cfg.agent_type(i)));
  }
}

TEST(ScriptedPrey, Examples) {
  const auto cfg = make_scenario(ScenarioKind::predator_prey, 3);
  auto s = reset(cfg, 1);
  for (std::size_t l = 0; l < 3; ++l) s.bodies[3 + l].pos = {-0.8, 0.7 - 0.7 * l};
  s.bodies[2].pos = {0.2, 0.0};
  s.bodies[0].pos = {-0.3, 0.0};
  s.bodies[1].pos = {-0.3, 5.0};
  auto a = scripted_prey(s, 0);
  EXPECT_NEAR(a.x, 1.0, 1e-12);
  EXPECT_NEAR(a.y, 0.0, 1e-12);

  s.bodies[2].pos = {1.0, 0.0};
  s.bodies[0].pos = {0.5, 0.0};
  a = scripted_prey(s, 0);
  EXPECT_LT(a.x, 1.0);

  s.bodies[0].pos = {-2.0, 0.0};
  s.bodies[1].pos = {-2.0, 1.0};
  a = scripted_prey(s, 0);
  EXPECT_EQ(a, (Vec2{0.0, 0.0}));
}

TEST(ScriptedPrey, AlwaysWithinUnitBox) {
  const auto cfg = make_scenario(ScenarioKind::predator_prey, 9);
  std::mt19937_64 rng(4);
  for (int ep = 0; ep < 10; ++ep) {
    auto s = reset(cfg, ep);
    for (int t = 0; t < 20; ++t) {
      for (const auto& a : scripted_prey_actions(s)) {
        ASSERT_LE(std::abs(a.x), 1.0);
        ASSERT_LE(std::abs(a.y), 1.0);
      }
      step(s, random_actions(cfg.agents, rng));
    }
  }
}

TEST(Trajectory, OneRowPerBodyPerStep) {
  const auto path = std::filesystem::temp_directory_path() / "samarl_traj_test.csv";
  const auto cfg = make_scenario(ScenarioKind::cooperative_navigation, 3);
  auto s = reset(cfg, 1);
  {
    TrajectoryWriter w(path);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 4; ++t) {
      const auto r = step(s, random_actions(3, rng));
      w.write(s, r.rewards);
    }
  }
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,body,x,y,vx,vy,reward");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4u * 6);
  std::filesystem::remove(path);
}

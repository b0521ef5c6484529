#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "rpf/simulator.hpp"

using namespace rpf;

namespace {

Scenario single(Vec2 start, Vec2 goal) {
  Scenario s;
  s.name = "single";
  s.robots = {{start, goal}};
  return s;
}

SimConfig apf_config(std::uint64_t seed = 0) {
  SimConfig c;
  c.seed = seed;
  c.mode = PlannerMode::VanillaApf;
  return c;
}

class FixedController : public Controller {
 public:
  explicit FixedController(ControlAction action) : action_(action) {}
  ControlAction decide(std::size_t robot, const Observation& obs) override {
    seen.emplace_back(robot, obs);
    return action_;
  }
  std::vector<std::pair<std::size_t, Observation>> seen;

 private:
  ControlAction action_;
};

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST(Step, SingleEulerStepTowardGoal) {
  Simulator sim(apf_config(), single({0, 0}, {3, 0}));
  const StepRecord rec = sim.step();
  EXPECT_EQ(rec.step, 1);
  ASSERT_EQ(rec.robots.size(), 1u);
  EXPECT_NEAR(sim.robots()[0].position.x, 0.05, 1e-15);
  EXPECT_EQ(sim.robots()[0].position.y, 0.0);
  EXPECT_EQ(sim.robots()[0].trail.size(), 2u);
  EXPECT_DOUBLE_EQ(rec.robots[0].reward.r_p, 1.0 - 2.95 / 10.0);
}

TEST(Step, SpawnedOnGoalArrivesWithoutMoving) {
  Simulator sim(apf_config(), single({1, 1}, {1.05, 1}));
  EXPECT_EQ(sim.robots()[0].status, RobotStatus::Arrived);
  EXPECT_TRUE(sim.finished());
  EXPECT_EQ(sim.initial_rewards()[0].r_m, 300.0);

  const EpisodeSummary summary = run_episode(apf_config(), single({1, 1}, {1.05, 1}));
  EXPECT_EQ(summary.steps, 0);
  EXPECT_EQ(summary.arrivals, 1);
  ASSERT_EQ(summary.returns.size(), 1u);
  EXPECT_EQ(summary.returns[0], 300.0);
  EXPECT_EQ(summary.robots[0].trail.size(), 1u);
}

TEST(RunEpisode, StraightLineArrivalStepCount) {
  const double d_s = 3.03;
  const WorldParams wp;
  // Oracle: first k with d_s - k * v * dt < r.
  int expected = 0;
  while (d_s - expected * wp.v * wp.dt >= wp.r) ++expected;

  const EpisodeSummary s = run_episode(apf_config(), single({0, 0}, {d_s, 0}));
  EXPECT_EQ(s.steps, expected);
  EXPECT_EQ(s.arrivals, 1);
  const auto& trail = s.robots[0].trail;
  ASSERT_EQ(trail.size(), static_cast<std::size_t>(expected) + 1);
  for (const Vec2& p : trail) EXPECT_EQ(p.y, 0.0);
  // Straight path: d_a equals distance covered, goal reward from the ratio.
  const auto& last = s.records.back().robots[0];
  EXPECT_TRUE(last.events & kEventArrived);
  EXPECT_NEAR(last.reward.r_m, 300.0 - 100.0 * (expected * 0.05) / d_s, 1e-9);
}

TEST(RunEpisode, HeadOnPairWithLambdaNeverCollides) {
  Scenario s;
  s.name = "head-on";
  s.robots = {{{-4, 0.05}, {4, 0.05}}, {{4, -0.05}, {-4, -0.05}}};
  SimConfig c = apf_config();
  c.max_steps = 200;
  const EpisodeSummary out = run_episode(c, s);
  EXPECT_EQ(out.collisions(), 0);
  double max_lateral = 0.0;
  for (const auto& rec : out.records) {
    if (rec.robots.size() == 2) {
      max_lateral = std::max(max_lateral, std::abs(rec.robots[0].position.y - rec.robots[1].position.y));
    }
  }
  EXPECT_GT(max_lateral, 0.1 + 0.5);
}

TEST(RunEpisode, SameSeedIsBitIdentical) {
  const Scenario s = scenario_by_name("cluttered", 5);
  SimConfig c = apf_config(5);
  c.max_steps = 300;
  const EpisodeSummary a = run_episode(c, s);
  const EpisodeSummary b = run_episode(c, s);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t t = 0; t < a.records.size(); ++t) {
    ASSERT_EQ(a.records[t].robots.size(), b.records[t].robots.size());
    for (std::size_t k = 0; k < a.records[t].robots.size(); ++k) {
      const auto& x = a.records[t].robots[k];
      const auto& y = b.records[t].robots[k];
      EXPECT_TRUE(same_bits(x.position.x, y.position.x));
      EXPECT_TRUE(same_bits(x.position.y, y.position.y));
      EXPECT_TRUE(same_bits(x.reward.total, y.reward.total));
    }
  }
}

TEST(Invariants, EveryDisplacementIsVDt) {
  const Scenario s = scenario_by_name("cluttered", 2);
  SimConfig c = apf_config(2);
  c.max_steps = 400;
  const EpisodeSummary out = run_episode(c, s);
  for (const RobotState& r : out.robots) {
    for (std::size_t k = 1; k < r.trail.size(); ++k) {
      EXPECT_NEAR(distance(r.trail[k], r.trail[k - 1]), 0.05, 1e-12);
    }
  }
}

TEST(Invariants, RotatingTheWorldRotatesTheTrails) {
  Scenario base = gen_circle_swap(5, 3.0);
  base.obstacles = {Obstacle::circle({0.3, 0.4}, 0.5)};
  SimConfig c = apf_config();
  c.max_steps = 250;
  const EpisodeSummary a = run_episode(c, base);

  const double theta = 0.7;
  Scenario turned = base;
  for (auto& r : turned.robots) {
    r.start = rotate(r.start, theta);
    r.goal = rotate(r.goal, theta);
  }
  turned.obstacles = {Obstacle::circle(rotate({0.3, 0.4}, theta), 0.5)};
  const EpisodeSummary b = run_episode(c, turned);

  ASSERT_EQ(a.steps, b.steps);
  for (std::size_t i = 0; i < a.robots.size(); ++i) {
    ASSERT_EQ(a.robots[i].trail.size(), b.robots[i].trail.size());
    for (std::size_t k = 0; k < a.robots[i].trail.size(); ++k) {
      const Vec2 want = rotate(a.robots[i].trail[k], theta);
      EXPECT_NEAR(b.robots[i].trail[k].x, want.x, 1e-9);
      EXPECT_NEAR(b.robots[i].trail[k].y, want.y, 1e-9);
    }
  }
}

TEST(VanillaPpoDirection, Examples) {
  EXPECT_EQ(vanilla_ppo_direction({1, 0}, 0.0), (Vec2{1, 0}));
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(vanilla_ppo_direction({1, 0}, 1.0).x, s, 1e-15);
  EXPECT_NEAR(vanilla_ppo_direction({1, 0}, 1.0).y, s, 1e-15);
  EXPECT_NEAR(vanilla_ppo_direction({1, 0}, -1.0).y, -s, 1e-15);
}

TEST(Modes, ControllerRequiredOutsideVanillaApf) {
  SimConfig c = apf_config();
  c.mode = PlannerMode::Rpf;
  Simulator sim(c, single({0, 0}, {3, 0}));
  EXPECT_THROW(sim.step(), std::invalid_argument);
}

TEST(Modes, SteeringIsClamped) {
  SimConfig c = apf_config();
  c.mode = PlannerMode::VanillaPpo;
  Simulator sim(c, single({0, 0}, {3, 0}));
  FixedController ctl({ApfParams{}, 10.0});
  const StepRecord rec = sim.step(&ctl);
  ASSERT_TRUE(rec.robots[0].steering.has_value());
  EXPECT_EQ(*rec.robots[0].steering, kMaxSteering);
  const Vec2 want = vanilla_ppo_direction({1, 0}, kMaxSteering) * 0.05;
  EXPECT_NEAR(sim.robots()[0].position.x, want.x, 1e-15);
  EXPECT_NEAR(sim.robots()[0].position.y, want.y, 1e-15);
}

TEST(Modes, DecisionsSeeThePreStepSnapshot) {
  SimConfig c = apf_config();
  c.mode = PlannerMode::Rpf;
  Scenario s;
  s.robots = {{{0, 0}, {3, 0}}, {{0, 1}, {3, 1}}, {{0, 2}, {3, 2}}};
  Simulator sim(c, s);
  std::vector<Observation> before;
  for (std::size_t i = 0; i < 3; ++i) before.push_back(sim.observe(i));
  FixedController ctl({ApfParams{0.05, 1.0}, 0.0});
  sim.step(&ctl);
  ASSERT_EQ(ctl.seen.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(ctl.seen[i].first, i);
    ASSERT_EQ(ctl.seen[i].second.neighbors.size(), before[i].neighbors.size());
    for (std::size_t k = 0; k < before[i].neighbors.size(); ++k) {
      EXPECT_EQ(ctl.seen[i].second.neighbors[k].d, before[i].neighbors[k].d);
    }
  }
}

TEST(Collisions, CollidedRobotsFreeze) {
  Scenario s;
  s.robots = {{{0, 0}, {3, 0}}};
  s.obstacles = {Obstacle::circle({0.85, 0.0}, 0.5)};
  SimConfig c = apf_config();
  c.wall_following = WallFollowing::Off;
  c.apf = {0.0, 2.0};  // no repulsion: drive straight into the circle
  const EpisodeSummary out = run_episode(c, s);
  EXPECT_EQ(out.obstacle_collisions, 1);
  EXPECT_EQ(out.robots[0].status, RobotStatus::Collided);
  const auto& hit = out.records.back().robots[0];
  EXPECT_TRUE(hit.events & kEventObstacleCollision);
  EXPECT_EQ(hit.reward.r_o, -100.0);
  EXPECT_TRUE(hit.done);
  EXPECT_LT(out.steps, 10);
}

TEST(Collisions, ParkedRobotsAreInvisible) {
  Scenario s;
  s.robots = {{{0, 0}, {0.02, 0}}, {{-3, 0}, {3, 0}}};
  SimConfig c = apf_config();
  c.park_arrived = true;
  c.apf = {0.05, 0.0};
  const EpisodeSummary parked = run_episode(c, s);
  EXPECT_EQ(parked.collisions(), 0);
  EXPECT_EQ(parked.arrivals, 2);
  // Straight through the parked robot's spot.
  for (const Vec2& p : parked.robots[1].trail) EXPECT_EQ(p.y, 0.0);

  c.park_arrived = false;
  const EpisodeSummary present = run_episode(c, s);
  EXPECT_EQ(present.robot_collisions, 1);
}

TEST(Config, Validation) {
  SimConfig c;
  c.max_steps = 0;
  EXPECT_THROW(Simulator(c, single({0, 0}, {1, 0})), std::invalid_argument);
  EXPECT_EQ(planner_mode_from_string("rpf"), PlannerMode::Rpf);
  EXPECT_EQ(planner_mode_from_string("apf"), PlannerMode::VanillaApf);
  EXPECT_EQ(planner_mode_from_string("ppo"), PlannerMode::VanillaPpo);
  EXPECT_THROW(planner_mode_from_string("dqn"), std::invalid_argument);
  EXPECT_EQ(to_string(PlannerMode::VanillaPpo), "ppo");
}

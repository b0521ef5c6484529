#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "rpf/params_io.hpp"
#include "rpf/policy.hpp"
#include "rpf/trainer.hpp"
#include "rpf/trajectory_io.hpp"

using namespace rpf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rpf_test_formats";
  fs::create_directories(dir);
  return dir / name;
}

EpisodeSummary short_episode(const Scenario& s, std::uint64_t seed = 0) {
  SimConfig c;
  c.seed = seed;
  c.max_steps = 40;
  return run_episode(c, s);
}

}  // namespace

TEST(FormatReal, ShortestRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 2000; ++k) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    EXPECT_EQ(std::stod(format_real(x)), x);
  }
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(Trajectory, HeaderAndColumnOrder) {
  const Scenario s = gen_circle_swap(3, 2.0);
  const std::string text = trajectory_to_string(s, short_episode(s));
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(text.back(), '\n');
  std::istringstream in(text);
  std::string line, header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = line;
    break;
  }
  EXPECT_EQ(header, kTrajectoryColumns);
}

TEST(Trajectory, RoundTripPreservesRows) {
  const Scenario s = scenario_by_name("cluttered", 4);
  const EpisodeSummary summary = short_episode(s, 4);
  std::istringstream in(trajectory_to_string(s, summary));
  const TrajectoryDocument doc = read_trajectory(in);
  EXPECT_EQ(doc.scenario, s.name);
  ASSERT_EQ(doc.robots.size(), s.robots.size());
  EXPECT_EQ(doc.obstacles.size(), s.obstacles.size());

  const auto trails = doc.trails();
  ASSERT_EQ(trails.size(), summary.robots.size());
  for (std::size_t i = 0; i < trails.size(); ++i) {
    ASSERT_EQ(trails[i].size(), summary.robots[i].trail.size());
    for (std::size_t k = 0; k < trails[i].size(); ++k) {
      EXPECT_EQ(trails[i][k], summary.robots[i].trail[k]);
    }
  }
  // Step 0 is the spawn row of every robot; VanillaApf rows carry (eta, lambda).
  EXPECT_EQ(doc.rows.front().step, 0);
  const TrajectoryRow& moving = doc.rows[s.robots.size()];
  EXPECT_EQ(moving.step, 1);
  EXPECT_EQ(moving.eta, 0.05);
  EXPECT_EQ(moving.lambda, 2.0);
}

TEST(Trajectory, SteeringRowsHaveNoApfScales) {
  Scenario s = gen_circle_swap(2, 2.0);
  SimConfig c;
  c.mode = PlannerMode::VanillaPpo;
  c.max_steps = 3;
  const PolicyBundle p = PolicyBundle::create(ActionKind::Steering, 0);
  PolicyController ctl(p, c.world, 0, true);
  const EpisodeSummary summary = run_episode(c, s, &ctl);
  std::istringstream in(trajectory_to_string(s, summary));
  const TrajectoryDocument doc = read_trajectory(in);
  EXPECT_TRUE(std::isnan(doc.rows.back().eta));
  EXPECT_TRUE(std::isnan(doc.rows.back().lambda));
}

TEST(Trajectory, MalformedInputIsRejected) {
  const Scenario s = gen_circle_swap(2, 2.0);
  const std::string good = trajectory_to_string(s, short_episode(s));
  {
    std::istringstream in("");
    EXPECT_THROW(read_trajectory(in), std::runtime_error);
  }
  {
    // Header only: no records.
    std::istringstream in(std::string(kTrajectoryColumns) + "\n");
    EXPECT_THROW(read_trajectory(in), std::runtime_error);
  }
  {
    std::string bad = good;
    bad += "7,0,1.0,not-a-number,0,0,0,0,0\n";
    std::istringstream in(bad);
    EXPECT_THROW(read_trajectory(in), std::runtime_error);
  }
  {
    std::string bad = good;
    bad += "7,0,1.0\n";
    std::istringstream in(bad);
    EXPECT_THROW(read_trajectory(in), std::runtime_error);
  }
  EXPECT_THROW(load_trajectory(scratch("missing.traj")), std::runtime_error);
}

TEST(ScenarioJson, RoundTrip) {
  Scenario s = scenario_by_name("cluttered", 8);
  s.params.d_r = 5.0;
  const Scenario back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(back.name, s.name);
  ASSERT_EQ(back.robots.size(), s.robots.size());
  for (std::size_t k = 0; k < s.robots.size(); ++k) {
    EXPECT_EQ(back.robots[k].start, s.robots[k].start);
    EXPECT_EQ(back.robots[k].goal, s.robots[k].goal);
  }
  EXPECT_EQ(back.obstacles.size(), s.obstacles.size());
  EXPECT_EQ(back.params.d_r, 5.0);

  const fs::path path = scratch("scenario.json");
  save_scenario(s, path);
  EXPECT_EQ(load_scenario(path).robots.size(), s.robots.size());
  EXPECT_EQ(scenario_by_name(path.string(), 0).name, s.name);
}

TEST(ScenarioJson, Errors) {
  EXPECT_THROW(scenario_from_json("{"), std::invalid_argument);
  EXPECT_THROW(scenario_from_json("[]"), std::invalid_argument);
  EXPECT_THROW(scenario_from_json(R"({"name": "x"})"), std::invalid_argument);
  EXPECT_THROW(scenario_from_json(R"({"robots": [{"start": [0, 0]}]})"), std::invalid_argument);
  EXPECT_THROW(scenario_from_json(R"({"robots": [{"start": [0], "goal": [1, 1]}]})"),
               std::invalid_argument);
  // Overlapping starts violate the 2r spacing invariant.
  EXPECT_THROW(
      scenario_from_json(
          R"({"robots": [{"start": [0, 0], "goal": [3, 0]}, {"start": [0.1, 0], "goal": [3, 1]}]})"),
      std::invalid_argument);
  EXPECT_THROW(scenario_from_json(R"({"params": {"warp": 2}, "robots": []})"),
               std::invalid_argument);
}

TEST(Params, FieldsRoundTrip) {
  WorldParams w;
  for (const auto& [key, value] : world_param_fields(WorldParams{})) {
    EXPECT_TRUE(is_world_param(key));
    set_world_param(w, key, value * 2.0);
  }
  EXPECT_EQ(w.d_r, 12.0);
  EXPECT_EQ(w.r, 0.2);

  PpoConfig c;
  set_ppo_param(c, "gamma", 0.99);
  set_ppo_param(c, "batch_steps", 50);
  EXPECT_EQ(c.gamma, 0.99);
  EXPECT_EQ(c.batch_steps, 50);
  EXPECT_EQ(ppo_config_fields(PpoConfig{}).size(), 14u);
}

TEST(Params, Errors) {
  WorldParams w;
  PpoConfig c;
  EXPECT_THROW(set_world_param(w, "gravity", 9.8), std::invalid_argument);
  EXPECT_THROW(set_ppo_param(c, "epochs", 1.5), std::invalid_argument);
  EXPECT_FALSE(is_ppo_param("d_r"));
  EXPECT_FALSE(is_world_param("gamma"));
}

TEST(Checkpoint, BitExactRoundTrip) {
  for (ActionKind kind : {ActionKind::ApfScales, ActionKind::Steering}) {
    PolicyBundle p = PolicyBundle::create(kind, 17);
    p.episodes = 12;
    p.updates = 30;
    const fs::path path = scratch("policy.bin");
    save_policy(p, path);
    const PolicyBundle q = load_policy(path);
    EXPECT_EQ(q.kind, kind);
    EXPECT_EQ(q.episodes, 12);
    EXPECT_EQ(q.updates, 30);
    EXPECT_EQ(parameter_fingerprint(p), parameter_fingerprint(q));
    EXPECT_TRUE(q.encoder == p.encoder);
    EXPECT_TRUE(q.actor == p.actor);
    EXPECT_TRUE(q.critic == p.critic);
    EXPECT_EQ(q.log_std, p.log_std);
  }
}

TEST(Checkpoint, CorruptFilesAreRejected) {
  const PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 2);
  std::ostringstream out;
  write_policy(out, p);
  const std::string bytes = out.str();
  {
    std::istringstream in(bytes.substr(0, bytes.size() / 2));
    EXPECT_THROW(read_policy(in), std::runtime_error);
  }
  {
    std::string bad = bytes;
    bad[0] = 'X';
    std::istringstream in(bad);
    EXPECT_THROW(read_policy(in), std::runtime_error);
  }
  {
    std::string bad = bytes;
    bad[8] = static_cast<char>(99);  // version
    std::istringstream in(bad);
    EXPECT_THROW(read_policy(in), std::runtime_error);
  }
  EXPECT_THROW(load_policy(scratch("absent.bin")), std::runtime_error);
}

TEST(EpisodeLogJson, FieldsAndTypes) {
  PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 0);
  PpoConfig ppo;
  ppo.steps_per_episode = 30;
  ppo.batch_steps = 25;
  Trainer trainer(p, ppo, SimConfig{}, 0);
  const Scenario s = gen_circle_swap(6, 2.0);
  const EpisodeLog first = trainer.train_episode(s);
  const EpisodeLog second = trainer.train_episode(s);
  EXPECT_EQ(first.updates + second.updates, 2);
  EXPECT_EQ(trainer.global_steps(), 60);
  EXPECT_EQ(p.episodes, 2);
  EXPECT_EQ(second.episode, 1);

  const auto doc = nlohmann::json::parse(second.to_json());
  for (const char* key : {"episode", "scenario", "return_mean", "return_min", "return_max",
                          "policy_loss", "value_loss", "entropy", "lr", "updates", "collisions",
                          "arrivals", "robots", "steps", "aborted"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_EQ(doc["robots"], 6);
  EXPECT_DOUBLE_EQ(doc["lr"].get<double>(), lr_schedule(3e-4, 0.999, 1));
  EXPECT_EQ(second.to_json().find('\n'), std::string::npos);
}

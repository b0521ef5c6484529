#include <benchmark/benchmark.h>

#include <random>

#include "rpf/apf.hpp"
#include "rpf/policy.hpp"
#include "rpf/scenario.hpp"
#include "rpf/simulator.hpp"
#include "rpf/trainer.hpp"

namespace {

rpf::Scenario arena() { return rpf::scenario_by_name("cluttered", 3); }

void BM_ComputeForces(benchmark::State& state) {
  const rpf::Scenario s = arena();
  rpf::SimConfig config;
  const rpf::Simulator sim(config, s);
  const auto robots = sim.robots();
  const rpf::WorldParams& w = sim.params();
  for (auto _ : state) {
    for (std::size_t i = 0; i < robots.size(); ++i) {
      const auto nearest = rpf::nearest_obstacle_point(robots[i].position, sim.obstacles(), w.d_r);
      const auto nbrs = rpf::visible_neighbors(i, robots, w.d_r);
      benchmark::DoNotOptimize(rpf::compute_forces(i, robots, nbrs, nearest, {0.05, 2.0}, w.rho));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(robots.size()));
}
BENCHMARK(BM_ComputeForces);

void BM_ObserveAndEmbed(benchmark::State& state) {
  const rpf::Scenario s = arena();
  rpf::SimConfig config;
  const rpf::Simulator sim(config, s);
  const auto policy = rpf::PolicyBundle::create(rpf::ActionKind::ApfScales, 1);
  for (auto _ : state) {
    for (std::size_t i = 0; i < s.robots.size(); ++i) {
      const auto inputs = rpf::normalize_observation(sim.observe(i), sim.params());
      benchmark::DoNotOptimize(policy.embed(inputs));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.robots.size()));
}
BENCHMARK(BM_ObserveAndEmbed);

void BM_SampleAction(benchmark::State& state) {
  const auto policy = rpf::PolicyBundle::create(rpf::ActionKind::ApfScales, 1);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(policy.actor.input_width()), -1.0, 1.0);
  std::mt19937_64 rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(rpf::sample_action(policy, x, rng, false));
}
BENCHMARK(BM_SampleAction);

// One synchronous step of all robots under fixed-gain APF with wall following.
void BM_SimulatorStepApf(benchmark::State& state) {
  const rpf::Scenario s = arena();
  rpf::SimConfig config;
  config.mode = rpf::PlannerMode::VanillaApf;
  auto sim = std::make_unique<rpf::Simulator>(config, s);
  for (auto _ : state) {
    if (sim->finished()) {
      state.PauseTiming();
      sim = std::make_unique<rpf::Simulator>(config, s);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(sim->step());
  }
}
BENCHMARK(BM_SimulatorStepApf);

void BM_SimulatorStepPolicy(benchmark::State& state) {
  const rpf::Scenario s = arena();
  rpf::SimConfig config;
  config.mode = rpf::PlannerMode::Rpf;
  const auto policy = rpf::PolicyBundle::create(rpf::ActionKind::ApfScales, 1);
  rpf::PolicyController controller(policy, config.world, 2, false);
  auto sim = std::make_unique<rpf::Simulator>(config, s);
  for (auto _ : state) {
    if (sim->finished()) {
      state.PauseTiming();
      sim = std::make_unique<rpf::Simulator>(config, s);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(sim->step(&controller));
  }
}
BENCHMARK(BM_SimulatorStepPolicy);

// A 100-step training episode: rollout plus exactly one PPO update.
void BM_TrainEpisodeWithUpdate(benchmark::State& state) {
  rpf::PpoConfig ppo;
  ppo.steps_per_episode = 100;
  ppo.batch_steps = 100;
  auto policy = rpf::PolicyBundle::create(rpf::ActionKind::ApfScales, 1);
  rpf::Trainer trainer(policy, ppo, rpf::SimConfig{}, 1);
  const rpf::Scenario s = rpf::scenario_by_name("circle6", 0);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.train_episode(s));
}
BENCHMARK(BM_TrainEpisodeWithUpdate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include "rpf/trainer.hpp"

#include <algorithm>
#include <vector>

#include "json.hpp"

namespace rpf {

namespace {

class RecordingController : public Controller {
 public:
  RecordingController(const PolicyBundle& policy, const WorldParams& params,
                      std::mt19937_64& rng, std::size_t robots)
      : policy_(policy), params_(params), rng_(rng), pending_(robots) {}

  ControlAction decide(std::size_t robot, const Observation& obs) override {
    Transition& t = pending_[robot];
    t.obs = normalize_observation(obs, params_);
    const ActionSample s = sample_action(policy_, policy_.embed(t.obs), rng_);
    t.raw = s.raw;
    t.action = s.action;
    t.log_prob = s.log_prob;
    t.value = s.value;
    return to_control_action(policy_.kind, s.action);
  }

  Transition take(std::size_t robot) { return std::move(pending_[robot]); }

 private:
  const PolicyBundle& policy_;
  const WorldParams& params_;
  std::mt19937_64& rng_;
  std::vector<Transition> pending_;
};

}  // namespace

std::string EpisodeLog::to_json() const {
  nlohmann::ordered_json j;
  j["episode"] = episode;
  j["scenario"] = scenario;
  j["return_mean"] = return_mean;
  j["return_min"] = return_min;
  j["return_max"] = return_max;
  j["policy_loss"] = policy_loss;
  j["value_loss"] = value_loss;
  j["entropy"] = entropy;
  j["lr"] = lr;
  j["updates"] = updates;
  j["collisions"] = collisions;
  j["arrivals"] = arrivals;
  j["robots"] = robots;
  j["steps"] = steps;
  j["aborted"] = aborted;
  return j.dump();
}

Trainer::Trainer(PolicyBundle& policy, PpoConfig ppo, SimConfig sim, std::uint64_t seed)
    : policy_(policy), ppo_(ppo), sim_(std::move(sim)), rng_(seed) {
  ppo_.validate();
  sim_.mode = planner_mode_for(policy_.kind);
  sim_.max_steps = ppo_.steps_per_episode;
  sim_.validate();
}

EpisodeLog Trainer::train_episode(const Scenario& scenario) {
  const std::int64_t episode = policy_.episodes;
  EpisodeLog log;
  log.episode = episode;
  log.scenario = scenario.name;
  log.lr = lr_schedule(ppo_.alpha0, ppo_.beta, episode);

  Simulator sim(sim_, scenario);
  RecordingController controller(policy_, sim_.world, rng_, scenario.robots.size());

  const auto bootstrap_open_streams = [&] {
    for (std::size_t i = 0; i < sim.robots().size(); ++i) {
      if (!sim.acting(i)) continue;
      const ObservationInputs obs = normalize_observation(sim.observe(i), sim_.world);
      buffer_.set_bootstrap(episode, i, policy_.value(policy_.embed(obs)));
    }
  };

  while (!sim.finished()) {
    const StepRecord rec = sim.step(&controller);
    log.collisions += static_cast<int>(rec.events.size());
    for (const RobotStepRecord& r : rec.robots) {
      Transition t = controller.take(r.robot);
      t.reward = r.reward.total * ppo_.reward_scale;
      t.done = r.done;
      t.robot_id = r.robot;
      t.episode = episode;
      t.timestep = rec.step;
      buffer_.add(std::move(t));
    }
    ++global_steps_;

    if (global_steps_ % ppo_.batch_steps == 0 && !buffer_.empty()) {
      bootstrap_open_streams();
      const UpdateStats st = ppo_update(policy_, buffer_, ppo_, log.lr, rng_);
      if (st.aborted) {
        log.aborted = true;
        break;
      }
      ++log.updates;
      log.policy_loss += st.policy_loss;
      log.value_loss += st.value_loss;
      log.entropy = st.entropy;
    }
  }
  // Streams cut by the step limit carry on in the buffer with a bootstrap.
  if (!log.aborted) bootstrap_open_streams();

  if (log.updates > 0) {
    log.policy_loss /= log.updates;
    log.value_loss /= log.updates;
  }
  const std::vector<double>& returns = sim.returns();
  log.robots = static_cast<int>(returns.size());
  if (!returns.empty()) {
    double sum = 0.0;
    for (double r : returns) sum += r;
    log.return_mean = sum / static_cast<double>(returns.size());
    log.return_min = *std::min_element(returns.begin(), returns.end());
    log.return_max = *std::max_element(returns.begin(), returns.end());
  }
  log.arrivals = static_cast<int>(std::count_if(sim.robots().begin(), sim.robots().end(),
      [](const RobotState& r) { return r.status == RobotStatus::Arrived; }));
  log.steps = sim.steps_taken();
  if (!log.aborted) ++policy_.episodes;
  return log;
}

}  // namespace rpf

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "rpf/ppo.hpp"

using namespace rpf;

namespace {

ObservationInputs sample_inputs(double goal_distance = 2.0, int neighbours = 1) {
  Observation obs;
  obs.local = {3.0, 0.4, goal_distance, -0.2};
  for (int k = 0; k < neighbours; ++k) obs.neighbors.push_back({1.0 + k, 0.3 * k, -0.5});
  return normalize_observation(obs, WorldParams{});
}

Transition make(std::size_t robot, int t, double reward, double value, bool done,
                std::int64_t episode = 0) {
  Transition tr;
  tr.obs = sample_inputs();
  tr.raw = Eigen::Vector2d::Zero();
  tr.action = Eigen::Vector2d(0.05, 2.5);
  tr.reward = reward;
  tr.value = value;
  tr.done = done;
  tr.robot_id = robot;
  tr.episode = episode;
  tr.timestep = t;
  return tr;
}

// Brute-force GAE for one stream: A_t = sum_l (gamma tau)^l delta_{t+l}.
std::vector<double> gae_oracle(const std::vector<double>& rewards, const std::vector<double>& values,
                               double bootstrap, bool done, double gamma, double tau) {
  const std::size_t n = rewards.size();
  std::vector<double> delta(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double next = t + 1 < n ? values[t + 1] : (done ? 0.0 : bootstrap);
    delta[t] = rewards[t] + gamma * next - values[t];
  }
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double weight = 1.0;
    for (std::size_t l = t; l < n; ++l) {
      adv[t] += weight * delta[l];
      weight *= gamma * tau;
    }
  }
  return adv;
}

// Fills the buffer with single-step episodes from one fixed observation.
void collect_bandit(const PolicyBundle& policy, RolloutBuffer& buffer, std::mt19937_64& rng,
                    int count, std::int64_t& episode) {
  const ObservationInputs inputs = sample_inputs(4.0, 2);
  const Eigen::VectorXd embedded = policy.embed(inputs);
  for (int k = 0; k < count; ++k) {
    const ActionSample s = sample_action(policy, embedded, rng);
    Transition t;
    t.obs = inputs;
    t.raw = s.raw;
    t.action = s.action;
    t.log_prob = s.log_prob;
    t.value = s.value;
    t.reward = s.action(1) / 5.0;
    t.done = true;
    t.episode = episode++;
    buffer.add(std::move(t));
  }
}

}  // namespace

TEST(LrSchedule, Examples) {
  EXPECT_DOUBLE_EQ(lr_schedule(3e-4, 0.999, 0), 3e-4);
  EXPECT_DOUBLE_EQ(lr_schedule(3e-4, 0.999, 1), 2.997e-4);
  EXPECT_NEAR(lr_schedule(3e-4, 0.999, 1000), 1.103e-4, 5e-8);
}

TEST(ClippedSurrogate, FourSignRatioCases) {
  // eps = 0.25 keeps every hand value exactly representable.
  EXPECT_EQ(clipped_surrogate(1.5, 2.0, 0.25), 1.25 * 2.0);
  EXPECT_EQ(clipped_surrogate(0.5, 2.0, 0.25), 0.5 * 2.0);
  EXPECT_EQ(clipped_surrogate(1.5, -2.0, 0.25), 1.5 * -2.0);
  EXPECT_EQ(clipped_surrogate(0.5, -2.0, 0.25), 0.75 * -2.0);
  // Inside the trust region both branches agree.
  EXPECT_EQ(clipped_surrogate(1.125, 4.0, 0.25), 4.5);
}

TEST(ClippedSurrogate, TableEpsilonExamples) {
  EXPECT_NEAR(clipped_surrogate(1.5, 1.0, 0.2), 1.2, 1e-15);
  EXPECT_NEAR(clipped_surrogate(0.5, -1.0, 0.2), -0.8, 1e-15);
}

TEST(ClippedSurrogate, BoundedForPositiveAdvantage) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ratio(0.0, 5.0), adv(0.0, 10.0);
  for (int k = 0; k < 10000; ++k) {
    const double a = adv(rng);
    EXPECT_LE(clipped_surrogate(ratio(rng), a, 0.2), 1.2 * a + 1e-12);
  }
}

TEST(Gae, TerminalSingleTransition) {
  RolloutBuffer b;
  b.add(make(0, 0, 1.0, 0.0, true));
  const AdvantageEstimate e = compute_advantages(b, 0.999, 0.9);
  EXPECT_EQ(e.advantages(0), 1.0);
  EXPECT_EQ(e.returns(0), 1.0);
}

TEST(Gae, ConstantValueTelescopesToZero) {
  RolloutBuffer b;
  for (int t = 0; t < 3; ++t) b.add(make(0, t, 0.0, 2.5, false));
  b.set_bootstrap(0, 0, 2.5);
  const AdvantageEstimate e = compute_advantages(b, 1.0, 0.9);
  for (int t = 0; t < 3; ++t) {
    EXPECT_NEAR(e.advantages(t), 0.0, 1e-12);
    EXPECT_NEAR(e.returns(t), 2.5, 1e-12);
  }
}

TEST(Gae, TauZeroIsOneStepTd) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  RolloutBuffer b;
  std::vector<double> r, v;
  for (int t = 0; t < 12; ++t) {
    r.push_back(n(rng));
    v.push_back(n(rng));
    b.add(make(0, t, r.back(), v.back(), false));
  }
  const double boot = n(rng);
  b.set_bootstrap(0, 0, boot);
  const AdvantageEstimate e = compute_advantages(b, 0.99, 0.0);
  for (int t = 0; t < 12; ++t) {
    const double next = t + 1 < 12 ? v[t + 1] : boot;
    EXPECT_NEAR(e.advantages(t), r[t] + 0.99 * next - v[t], 1e-12);
  }
}

TEST(Gae, MatchesBruteForcePerStream) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  const double gamma = 0.999, tau = 0.9;
  // Three robots interleaved by timestep; robot 1 terminates early.
  std::vector<std::vector<double>> r(3), v(3);
  RolloutBuffer b;
  for (int t = 0; t < 20; ++t) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (k == 1 && t > 7) continue;
      r[k].push_back(n(rng));
      v[k].push_back(n(rng));
      b.add(make(k, t, r[k].back(), v[k].back(), k == 1 && t == 7));
    }
  }
  const std::vector<double> boots{0.7, 0.0, -1.3};
  b.set_bootstrap(0, 0, boots[0]);
  b.set_bootstrap(0, 2, boots[2]);
  const AdvantageEstimate e = compute_advantages(b, gamma, tau);

  std::vector<std::vector<double>> want(3);
  for (std::size_t k = 0; k < 3; ++k) want[k] = gae_oracle(r[k], v[k], boots[k], k == 1, gamma, tau);
  std::vector<std::size_t> seen(3, 0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Transition& t = b.transitions()[i];
    const std::size_t k = t.robot_id;
    EXPECT_NEAR(e.advantages(static_cast<Eigen::Index>(i)), want[k][seen[k]], 1e-12);
    EXPECT_NEAR(e.returns(static_cast<Eigen::Index>(i)), want[k][seen[k]] + t.value, 1e-12);
    ++seen[k];
  }
}

TEST(Gae, StreamsOfDifferentEpisodesStaySeparate) {
  RolloutBuffer b;
  b.add(make(0, 0, 1.0, 0.0, false, 0));
  b.add(make(0, 0, 5.0, 0.0, true, 1));
  b.set_bootstrap(0, 0, 0.0);
  const AdvantageEstimate e = compute_advantages(b, 1.0, 1.0);
  EXPECT_EQ(e.advantages(0), 1.0);
  EXPECT_EQ(e.advantages(1), 5.0);
}

TEST(Gae, MissingBootstrapThrows) {
  RolloutBuffer b;
  b.add(make(3, 0, 1.0, 0.0, false));
  EXPECT_THROW(compute_advantages(b, 0.99, 0.9), std::logic_error);
}

TEST(Gae, CanonicalizeOrdersByTimestepThenRobot) {
  RolloutBuffer b;
  b.add(make(2, 1, 0, 0, false));
  b.add(make(0, 1, 0, 0, false));
  b.add(make(1, 0, 0, 0, false));
  b.canonicalize();
  EXPECT_EQ(b.transitions()[0].robot_id, 1u);
  EXPECT_EQ(b.transitions()[1].robot_id, 0u);
  EXPECT_EQ(b.transitions()[2].robot_id, 2u);
}

TEST(NormalizeAdvantages, ZeroMeanUnitVariance) {
  Eigen::VectorXd a(5);
  a << 1, 2, 3, 4, 10;
  const Eigen::VectorXd z = normalize_advantages(a);
  EXPECT_NEAR(z.mean(), 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt((z.array() - z.mean()).square().sum() / 5.0), 1.0, 1e-9);
  Eigen::VectorXd one(1);
  one << 4.0;
  EXPECT_EQ(normalize_advantages(one)(0), 0.0);
}

TEST(SampleAction, StaysInsideTheBox) {
  PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 1);
  p.log_std.setConstant(1.5);
  std::mt19937_64 rng(0);
  const Eigen::VectorXd e = p.embed(sample_inputs());
  for (int k = 0; k < 100000; ++k) {
    const ActionSample s = sample_action(p, e, rng);
    ASSERT_TRUE(p.actions.contains(s.action));
    ASSERT_GE(s.action(0), 0.0);
    ASSERT_LE(s.action(0), 0.1);
    ASSERT_GE(s.action(1), 0.0);
    ASSERT_LE(s.action(1), 5.0);
  }
}

TEST(SampleAction, CentredMeanGivesCentredActions) {
  PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 2);
  auto& last = p.actor.layers().back();
  last.weights.setZero();
  last.bias.setZero();
  std::mt19937_64 rng(3);
  const Eigen::VectorXd e = p.embed(sample_inputs());
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  const int n = 100000;
  for (int k = 0; k < n; ++k) sum += sample_action(p, e, rng).action;
  const Eigen::Vector2d mean = sum / n;
  EXPECT_NEAR(mean(0), 0.05, 0.02 * 0.05);
  EXPECT_NEAR(mean(1), 2.5, 0.02 * 2.5);
}

TEST(SampleAction, DeterministicAndVanishingSpread) {
  PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 4);
  std::mt19937_64 rng(1);
  const Eigen::VectorXd e = p.embed(sample_inputs());
  const Eigen::VectorXd mean = p.actor.forward(e);
  const ActionSample det = sample_action(p, e, rng, true);
  EXPECT_EQ(det.action, squash_action(p.actions, mean));
  p.log_std.setConstant(-40.0);
  const ActionSample tight = sample_action(p, e, rng);
  EXPECT_TRUE(tight.action.isApprox(det.action, 1e-12));
  EXPECT_DOUBLE_EQ(det.value, p.value(e));
}

TEST(SampleAction, LogProbIncludesSquashCorrection) {
  PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 6);
  std::mt19937_64 rng(2);
  const Eigen::VectorXd e = p.embed(sample_inputs());
  const Eigen::VectorXd mean = p.actor.forward(e);
  for (int k = 0; k < 100; ++k) {
    const ActionSample s = sample_action(p, e, rng);
    double want = 0.0;
    for (Eigen::Index d = 0; d < 2; ++d) {
      const double sigma = std::exp(p.log_std(d));
      const double z = (s.raw(d) - mean(d)) / sigma;
      const double half = (p.actions.high(d) - p.actions.low(d)) / 2.0;
      const double th = std::tanh(s.raw(d));
      want += -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * kPi);
      want -= std::log(half * (1.0 - th * th));
    }
    EXPECT_NEAR(s.log_prob, want, 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST(Entropy, GaussianClosedForm) {
  Eigen::VectorXd ls(2);
  ls << std::log(0.5), 0.3;
  const double want = 2.0 * 0.5 * (1.0 + std::log(2.0 * kPi)) + std::log(0.5) + 0.3;
  EXPECT_NEAR(gaussian_entropy(ls), want, 1e-12);
}

TEST(PpoConfig, Validation) {
  PpoConfig c;
  EXPECT_NO_THROW(c.validate());
  for (auto breaker : std::vector<void (*)(PpoConfig&)>{
           [](PpoConfig& x) { x.epsilon = 1.0; }, [](PpoConfig& x) { x.gamma = 1.5; },
           [](PpoConfig& x) { x.tau = -0.1; }, [](PpoConfig& x) { x.batch_steps = 0; },
           [](PpoConfig& x) { x.alpha0 = 0.0; }, [](PpoConfig& x) { x.epochs = 0; }}) {
    PpoConfig bad;
    breaker(bad);
    EXPECT_THROW(bad.validate(), std::invalid_argument);
  }
}

TEST(PpoUpdate, EmptyBufferThrows) {
  PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 0);
  RolloutBuffer b;
  std::mt19937_64 rng(0);
  EXPECT_THROW(ppo_update(p, b, PpoConfig{}, 3e-4, rng), std::invalid_argument);
}

TEST(PpoUpdate, ConsumesBufferAndCountsUpdates) {
  PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 0);
  RolloutBuffer b;
  std::mt19937_64 rng(0);
  std::int64_t episode = 0;
  collect_bandit(p, b, rng, 100, episode);
  const std::uint64_t before = parameter_fingerprint(p);
  const UpdateStats s = ppo_update(p, b, PpoConfig{}, 3e-4, rng);
  EXPECT_TRUE(b.empty());
  EXPECT_EQ(p.updates, 1);
  EXPECT_EQ(s.samples, 100u);
  EXPECT_EQ(s.gradient_steps, 2);  // minibatches of 64 over 100 samples
  EXPECT_FALSE(s.aborted);
  EXPECT_NE(parameter_fingerprint(p), before);
  EXPECT_TRUE(std::isfinite(s.total_loss));
  // First epoch on fresh samples: ratio 1, nothing clipped.
  EXPECT_EQ(s.clip_fraction, 0.0);
}

TEST(PpoUpdate, NonFiniteLossRestoresParameters) {
  PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 0);
  RolloutBuffer b;
  std::mt19937_64 rng(0);
  std::int64_t episode = 0;
  collect_bandit(p, b, rng, 10, episode);
  b.transitions()[3].reward = std::numeric_limits<double>::quiet_NaN();
  const std::uint64_t before = parameter_fingerprint(p);
  PpoConfig c;
  c.minibatch_size = 0;
  const UpdateStats s = ppo_update(p, b, c, 3e-4, rng);
  EXPECT_TRUE(s.aborted);
  EXPECT_EQ(parameter_fingerprint(p), before);
  EXPECT_TRUE(b.empty());
}

TEST(PpoUpdate, BitIdenticalAfterTenUpdates) {
  auto run = [] {
    PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 9);
    std::mt19937_64 rng(9);
    RolloutBuffer b;
    std::int64_t episode = 0;
    for (int u = 0; u < 10; ++u) {
      collect_bandit(p, b, rng, 40, episode);
      ppo_update(p, b, PpoConfig{}, 1e-3, rng);
    }
    std::ostringstream out;
    write_policy(out, p);
    return out.str();
  };
  EXPECT_EQ(run(), run());
}

TEST(PpoUpdate, LearnsABandit) {
  // Reward grows with lambda; the policy mean for lambda should follow.
  PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 12);
  std::mt19937_64 rng(12);
  RolloutBuffer b;
  std::int64_t episode = 0;
  const Eigen::VectorXd e0 = p.embed(sample_inputs(4.0, 2));
  const double lambda_before = sample_action(p, e0, rng, true).action(1);
  PpoConfig c;
  c.epochs = 4;
  for (int u = 0; u < 40; ++u) {
    collect_bandit(p, b, rng, 64, episode);
    ppo_update(p, b, c, 1e-3, rng);
  }
  const Eigen::VectorXd e1 = p.embed(sample_inputs(4.0, 2));
  const double lambda_after = sample_action(p, e1, rng, true).action(1);
  EXPECT_GT(lambda_after, lambda_before + 1.0);
}

TEST(ParameterSharing, EveryRobotQueriesTheSameParameters) {
  const PolicyBundle p = PolicyBundle::create(ActionKind::ApfScales, 3);
  std::ostringstream a, b;
  write_policy(a, p);
  std::istringstream in(a.str());
  const PolicyBundle copy = read_policy(in);
  write_policy(b, copy);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(parameter_fingerprint(p), parameter_fingerprint(copy));

  // Two robots with identical observations get identical deterministic actions.
  PolicyController c(p, WorldParams{}, 0, true);
  Observation obs;
  obs.local = {2.0, 0.1, 3.0, 0.2};
  const ControlAction x = c.decide(0, obs);
  const ControlAction y = c.decide(5, obs);
  EXPECT_EQ(x.apf.eta, y.apf.eta);
  EXPECT_EQ(x.apf.lambda, y.apf.lambda);
}

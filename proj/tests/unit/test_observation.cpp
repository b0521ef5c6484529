#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "rpf/observation.hpp"

using namespace rpf;

namespace {

RobotState robot(std::size_t id, Vec2 p, double heading, Vec2 goal = {0, 0}) {
  RobotState r;
  r.id = id;
  r.position = p;
  r.heading = heading;
  r.goal = goal;
  r.trail.push_back(p);
  return r;
}

nn::DenseNet encoder(std::uint64_t seed, std::size_t width = 16) {
  std::mt19937_64 rng(seed);
  nn::DenseNet e = make_encoder(width, rng);
  // Non-zero biases so ReLU outputs are not trivially sparse.
  for (Eigen::Index k = 0; k < e.layers()[0].bias.size(); ++k) e.layers()[0].bias(k) = 0.05 * k;
  return e;
}

}  // namespace

TEST(BuildObservation, GoalDeadAhead) {
  const std::vector<RobotState> robots{robot(0, {1, 1}, 0.0, {3, 1})};
  const Observation obs = build_observation(0, robots, std::vector<Obstacle>{}, WorldParams{});
  EXPECT_DOUBLE_EQ(obs.local.d_g, 2.0);
  EXPECT_DOUBLE_EQ(obs.local.phi_g, 0.0);
  // No obstacle in range: sentinel.
  EXPECT_EQ(obs.local.d_o, 6.0);
  EXPECT_EQ(obs.local.phi_o, 0.0);
  EXPECT_TRUE(obs.neighbors.empty());
}

TEST(BuildObservation, ObstacleToTheLeftIsPlusHalfPi) {
  const std::vector<RobotState> robots{robot(0, {0, 0}, 0.0, {5, 0})};
  const std::vector<Obstacle> obstacles{Obstacle::circle({0, 2.0}, 0.5)};
  const Observation obs = build_observation(0, robots, obstacles, WorldParams{});
  EXPECT_DOUBLE_EQ(obs.local.d_o, 1.5);
  EXPECT_NEAR(obs.local.phi_o, kPi / 2.0, 1e-15);
}

TEST(BuildObservation, BodyFrameFollowsHeading) {
  // Heading +y: a goal on +x is to the right, i.e. -pi/2.
  const std::vector<RobotState> robots{robot(0, {0, 0}, kPi / 2.0, {4, 0})};
  const Observation obs = build_observation(0, robots, std::vector<Obstacle>{}, WorldParams{});
  EXPECT_NEAR(obs.local.phi_g, -kPi / 2.0, 1e-15);
}

TEST(BuildObservation, NeighbourBlocks) {
  const std::vector<RobotState> robots{robot(0, {0, 0}, 0.3, {5, 0}), robot(1, {0, -2}, 0.3),
                                       robot(2, {3, 0}, -2.0), robot(3, {10, 0}, 0.0)};
  const Observation obs = build_observation(0, robots, std::vector<Obstacle>{}, WorldParams{});
  ASSERT_EQ(obs.neighbors.size(), 2u);
  EXPECT_DOUBLE_EQ(obs.neighbors[0].d, 2.0);
  EXPECT_EQ(obs.neighbors[0].psi, 0.0);
  EXPECT_NEAR(obs.neighbors[0].phi, wrap_angle(-kPi / 2.0 - 0.3), 1e-15);
  EXPECT_DOUBLE_EQ(obs.neighbors[1].d, 3.0);
  EXPECT_NEAR(obs.neighbors[1].psi, -2.3, 1e-15);
}

TEST(BuildObservation, AnglesStayWrapped) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(-3.0, 3.0), ang(-20.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RobotState> robots;
    for (std::size_t k = 0; k < 5; ++k) {
      robots.push_back(robot(k, {pos(rng), pos(rng)}, ang(rng), {pos(rng), pos(rng)}));
    }
    const std::vector<Obstacle> obstacles{Obstacle::circle({pos(rng) + 8.0, pos(rng)}, 0.5)};
    const Observation obs = build_observation(0, robots, obstacles, WorldParams{});
    for (double a : {obs.local.phi_o, obs.local.phi_g}) {
      EXPECT_GT(a, -kPi);
      EXPECT_LE(a, kPi);
    }
    for (const NeighborBlock& n : obs.neighbors) {
      EXPECT_GT(n.phi, -kPi);
      EXPECT_LE(n.phi, kPi);
      EXPECT_GT(n.psi, -kPi);
      EXPECT_LE(n.psi, kPi);
      EXPECT_LT(n.d, 6.0);
    }
  }
}

TEST(MeanEmbed, NoNeighboursGivesZeroMean) {
  const nn::DenseNet e = encoder(1);
  Observation obs;
  obs.local = {2.0, 0.1, 3.0, -0.4};
  const Eigen::VectorXd out = mean_embed(obs, e, WorldParams{});
  ASSERT_EQ(out.size(), 4 + 16);
  EXPECT_TRUE(out.tail(16).isZero());
  EXPECT_EQ(out.head(4), normalized_local(obs.local, WorldParams{}));
}

TEST(MeanEmbed, SingletonAndDuplicate) {
  const nn::DenseNet e = encoder(2);
  const WorldParams params;
  Observation one;
  one.local = {2.0, 0.1, 3.0, -0.4};
  one.neighbors = {{1.5, 0.7, -0.2}};
  const Eigen::VectorXd single = mean_embed(one, e, params);

  Eigen::VectorXd in(7);
  in << normalized_local(one.local, params), normalized_neighbor(one.neighbors[0], params);
  const Eigen::VectorXd e_j = (e.layers()[0].weights * in + e.layers()[0].bias).cwiseMax(0.0);
  EXPECT_TRUE(single.tail(16).isApprox(e_j, 1e-15));

  Observation two = one;
  two.neighbors.push_back(one.neighbors[0]);
  EXPECT_TRUE(mean_embed(two, e, params).isApprox(single, 1e-15));
}

TEST(MeanEmbed, PermutationInvariantBitForBit) {
  const nn::DenseNet e = encoder(3, 64);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(0.2, 5.9), a(-3.0, 3.0);
  Observation obs;
  obs.local = {1.0, 0.2, 4.0, 1.1};
  for (int k = 0; k < 7; ++k) obs.neighbors.push_back({d(rng), a(rng), a(rng)});
  const Eigen::VectorXd base = mean_embed(obs, e, WorldParams{});
  for (int trial = 0; trial < 50; ++trial) {
    std::shuffle(obs.neighbors.begin(), obs.neighbors.end(), rng);
    const Eigen::VectorXd got = mean_embed(obs, e, WorldParams{});
    ASSERT_EQ(got.size(), base.size());
    EXPECT_EQ(std::memcmp(got.data(), base.data(), sizeof(double) * got.size()), 0);
  }
}

TEST(MeanEmbed, FixedLengthForAnyNeighbourCount) {
  const nn::DenseNet e = encoder(4, 64);
  Observation obs;
  obs.local = {1.0, 0.0, 1.0, 0.0};
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(mean_embed(obs, e, WorldParams{}).size(), 68);
    obs.neighbors.push_back({1.0 + k * 0.3, 0.1 * k, -0.1 * k});
  }
}

TEST(MeanEmbed, BackwardMatchesFiniteDifferences) {
  nn::DenseNet e = encoder(5, 8);
  const WorldParams params;
  Observation obs;
  obs.local = {1.0, 0.3, 2.0, -0.5};
  obs.neighbors = {{1.2, 0.4, 0.1}, {3.3, -1.0, 2.0}, {0.8, 2.5, -1.5}};
  const ObservationInputs inputs = normalize_observation(obs, params);
  Eigen::VectorXd c(12);
  for (Eigen::Index k = 0; k < 12; ++k) c(k) = std::sin(1.0 + k);

  EmbeddingPass pass;
  mean_embed(inputs, e, &pass);
  nn::GradientTape tape = e.zero_tape();
  mean_embed_backward(pass, e, c, tape);

  const double h = 1e-6;
  for (Eigen::Index k = 0; k < e.layers()[0].weights.size(); ++k) {
    double& w = e.layers()[0].weights.data()[k];
    const double keep = w;
    w = keep + h;
    const double up = c.dot(mean_embed(inputs, e));
    w = keep - h;
    const double down = c.dot(mean_embed(inputs, e));
    w = keep;
    EXPECT_NEAR(tape.weights[0].data()[k], (up - down) / (2 * h), 1e-7);
  }
}

TEST(MeanEmbed, EncoderWidthIsChecked) {
  std::mt19937_64 rng(0);
  const std::array<std::size_t, 2> widths{5, 4};
  const nn::DenseNet wrong =
      nn::DenseNet::glorot(widths, nn::Activation::ReLU, nn::Activation::ReLU, rng);
  Observation obs;
  EXPECT_THROW(mean_embed(obs, wrong, WorldParams{}), std::invalid_argument);
}

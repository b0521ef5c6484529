#include "rpf/observation.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace rpf {

namespace {

double body_bearing(Vec2 from, Vec2 to, double heading) {
  const Vec2 offset = to - from;
  if (!(norm(offset) > kNormEpsilon)) return 0.0;
  return wrap_angle(heading_of(offset) - heading);
}

}  // namespace

Observation build_observation(std::size_t i, std::span<const RobotState> robots,
                              std::span<const Obstacle> obstacles, const WorldParams& params,
                              bool include_arrived) {
  const RobotState& self = robots[i];
  Observation obs;
  if (const auto contact = nearest_obstacle_point(self.position, obstacles, params.d_r)) {
    obs.local.d_o = contact->distance;
    obs.local.phi_o = body_bearing(self.position, contact->surface, self.heading);
  } else {
    obs.local.d_o = params.d_r;
    obs.local.phi_o = 0.0;
  }
  obs.local.d_g = self.goal_distance();
  obs.local.phi_g = body_bearing(self.position, self.goal, self.heading);

  for (std::size_t j : visible_neighbors(i, robots, params.d_r, include_arrived)) {
    const RobotState& other = robots[j];
    obs.neighbors.push_back({distance(other.position, self.position),
                             body_bearing(self.position, other.position, self.heading),
                             wrap_angle(other.heading - self.heading)});
  }
  return obs;
}

Eigen::VectorXd normalized_local(const LocalBlock& local, const WorldParams& params) {
  Eigen::VectorXd x(kLocalWidth);
  x << local.d_o / params.d_r, local.phi_o / kPi, local.d_g / params.d_m, local.phi_g / kPi;
  return x;
}

Eigen::VectorXd normalized_neighbor(const NeighborBlock& neighbor, const WorldParams& params) {
  Eigen::VectorXd x(kNeighborWidth);
  x << neighbor.d / params.d_r, neighbor.phi / kPi, neighbor.psi / kPi;
  return x;
}

ObservationInputs normalize_observation(const Observation& obs, const WorldParams& params) {
  ObservationInputs inputs;
  inputs.local = normalized_local(obs.local, params);
  for (const NeighborBlock& n : obs.neighbors) inputs.neighbors.push_back(normalized_neighbor(n, params));
  std::sort(inputs.neighbors.begin(), inputs.neighbors.end(),
            [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
              return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
            });
  return inputs;
}

nn::DenseNet make_encoder(std::size_t width, std::mt19937_64& rng) {
  const std::array<std::size_t, 2> widths{kEncoderInputWidth, width};
  return nn::DenseNet::glorot(widths, nn::Activation::ReLU, nn::Activation::ReLU, rng);
}

Eigen::VectorXd mean_embed(const ObservationInputs& inputs, const nn::DenseNet& encoder,
                           EmbeddingPass* pass) {
  if (encoder.input_width() != kEncoderInputWidth) {
    throw std::invalid_argument("mean_embed: encoder must take o_loc and one neighbour block");
  }
  const auto width = static_cast<Eigen::Index>(encoder.output_width());
  const auto count = static_cast<Eigen::Index>(inputs.neighbors.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(width);
  if (count > 0) {
    Eigen::MatrixXd batch(static_cast<Eigen::Index>(kEncoderInputWidth), count);
    for (Eigen::Index k = 0; k < count; ++k) {
      batch.col(k) << inputs.local, inputs.neighbors[static_cast<std::size_t>(k)];
    }
    nn::ForwardCache scratch;
    nn::ForwardCache& cache = pass != nullptr ? pass->cache : scratch;
    const Eigen::MatrixXd encoded = encoder.forward_batch(batch, cache);
    for (Eigen::Index k = 0; k < count; ++k) mean += encoded.col(k);
    mean /= static_cast<double>(count);
  }
  if (pass != nullptr) pass->neighbors = static_cast<std::size_t>(count);

  Eigen::VectorXd out(static_cast<Eigen::Index>(kLocalWidth) + width);
  out << inputs.local, mean;
  return out;
}

Eigen::VectorXd mean_embed(const Observation& obs, const nn::DenseNet& encoder,
                           const WorldParams& params) {
  return mean_embed(normalize_observation(obs, params), encoder);
}

void mean_embed_backward(const EmbeddingPass& pass, const nn::DenseNet& encoder,
                         const Eigen::VectorXd& grad_output, nn::GradientTape& tape) {
  if (pass.neighbors == 0) return;
  const auto count = static_cast<Eigen::Index>(pass.neighbors);
  const Eigen::VectorXd grad_mean =
      grad_output.tail(static_cast<Eigen::Index>(encoder.output_width())) /
      static_cast<double>(count);
  const Eigen::MatrixXd grad = grad_mean.replicate(1, count);
  encoder.backward_batch(pass.cache, grad, tape);
}

}  // namespace rpf

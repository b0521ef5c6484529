#ifndef RPF_OBSERVATION_HPP_
#define RPF_OBSERVATION_HPP_

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rpf/geometry.hpp"
#include "rpf/neural.hpp"

namespace rpf {

/// Nearest obstacle and goal, in the robot's body frame (angle 0 = heading).
struct LocalBlock {
  double d_o = 0.0;
  double phi_o = 0.0;
  double d_g = 0.0;
  double phi_g = 0.0;
};

/// One sensed neighbour: range, body-frame bearing and relative heading.
struct NeighborBlock {
  double d = 0.0;
  double phi = 0.0;
  double psi = 0.0;
};

struct Observation {
  LocalBlock local;
  std::vector<NeighborBlock> neighbors;  // nearest first
};

inline constexpr std::size_t kLocalWidth = 4;
inline constexpr std::size_t kNeighborWidth = 3;
inline constexpr std::size_t kEncoderInputWidth = kLocalWidth + kNeighborWidth;
inline constexpr std::size_t kDefaultEmbeddingWidth = 64;

/// Senses robot i's surroundings. With no obstacle inside d_r the obstacle
/// slot holds the sentinel (d_r, 0).
Observation build_observation(std::size_t i, std::span<const RobotState> robots,
                              std::span<const Obstacle> obstacles, const WorldParams& params,
                              bool include_arrived = true);

// Network inputs are scaled to O(1): ranges by d_r, goal distance by d_m,
// angles by pi.
Eigen::VectorXd normalized_local(const LocalBlock& local, const WorldParams& params);
Eigen::VectorXd normalized_neighbor(const NeighborBlock& neighbor, const WorldParams& params);

/// Network-ready form of an Observation: scaled blocks, with the neighbour
/// blocks in a canonical (lexicographic) order independent of sensing order.
struct ObservationInputs {
  Eigen::VectorXd local;
  std::vector<Eigen::VectorXd> neighbors;
};

ObservationInputs normalize_observation(const Observation& obs, const WorldParams& params);

/// One-layer ReLU encoder phi_e([o_loc; w_j]) -> R^width.
nn::DenseNet make_encoder(std::size_t width, std::mt19937_64& rng);

/// Cache of one embedding forward pass (one column per neighbour).
struct EmbeddingPass {
  nn::ForwardCache cache;
  std::size_t neighbors = 0;
};

/// [o_loc; mean_j relu(W [o_loc; w_j] + b)]; the mean is the zero vector when
/// there are no neighbours. The reduction runs over the canonical order, so
/// the output is bit-identical under any permutation of the neighbour list.
Eigen::VectorXd mean_embed(const ObservationInputs& inputs, const nn::DenseNet& encoder,
                           EmbeddingPass* pass = nullptr);
Eigen::VectorXd mean_embed(const Observation& obs, const nn::DenseNet& encoder,
                           const WorldParams& params);

/// Accumulates encoder gradients given d(loss)/d(embedded observation).
void mean_embed_backward(const EmbeddingPass& pass, const nn::DenseNet& encoder,
                         const Eigen::VectorXd& grad_output, nn::GradientTape& tape);

}  // namespace rpf

#endif  // RPF_OBSERVATION_HPP_

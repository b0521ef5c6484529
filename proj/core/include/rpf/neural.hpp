#ifndef RPF_NEURAL_HPP_
#define RPF_NEURAL_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rpf::nn {

enum class Activation : std::uint8_t { Identity = 0, ReLU = 1, Tanh = 2 };

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
  Activation activation = Activation::Identity;
};

/// Per-layer inputs and post-activation outputs recorded by a forward pass.
/// Columns are samples.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> outputs;
};

/// Gradient buffers shaped like a DenseNet's parameters.
struct GradientTape {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> bias;

  void set_zero();
  void scale(double factor);
  double squared_norm() const;
  GradientTape& operator+=(const GradientTape& other);
};

class DenseNet {
 public:
  DenseNet() = default;
  /// Throws std::invalid_argument if consecutive layer shapes disagree.
  explicit DenseNet(std::vector<DenseLayer> layers);

  /// Glorot-uniform weights, zero biases. `widths` lists input, hidden..., output.
  static DenseNet glorot(std::span<const std::size_t> widths, Activation hidden,
                         Activation output, std::mt19937_64& rng);

  std::size_t input_width() const;
  std::size_t output_width() const;
  std::size_t parameter_count() const;
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  /// Throws std::invalid_argument on input width mismatch.
  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& input, ForwardCache& cache) const;

  /// Reverse pass for one cached forward. Accumulates parameter gradients
  /// into `tape` and returns the gradient with respect to the input.
  Eigen::VectorXd backward(const ForwardCache& cache, const Eigen::VectorXd& grad_output,
                           GradientTape& tape) const;

  /// Column-batched variants: one sample per column. Gradients are summed
  /// over the batch.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs, ForwardCache& cache) const;
  Eigen::MatrixXd backward_batch(const ForwardCache& cache, const Eigen::MatrixXd& grad_outputs,
                                 GradientTape& tape) const;

  GradientTape zero_tape() const;

  bool all_finite() const;
  friend bool operator==(const DenseNet& a, const DenseNet& b);

 private:
  std::vector<DenseLayer> layers_;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  GradientTape first;
  GradientTape second;
  std::int64_t steps = 0;

  static AdamState for_net(const DenseNet& net);
};

struct VectorAdamState {
  Eigen::VectorXd first;
  Eigen::VectorXd second;
  std::int64_t steps = 0;

  static VectorAdamState zeros(Eigen::Index size);
};

void adam_step(DenseNet& net, const GradientTape& grad, double lr, AdamState& state,
               const AdamConfig& config = {});
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr,
               VectorAdamState& state, const AdamConfig& config = {});

// Binary serialisation. Doubles are written as raw IEEE-754 bytes, so a
// save/load round trip is bit-exact. Readers throw std::runtime_error on
// truncated or malformed input.
void write_vector(std::ostream& out, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(std::istream& in);
void write_net(std::ostream& out, const DenseNet& net);
DenseNet read_net(std::istream& in);
void write_adam(std::ostream& out, const AdamState& state);
AdamState read_adam(std::istream& in);
void write_adam(std::ostream& out, const VectorAdamState& state);
VectorAdamState read_vector_adam(std::istream& in);

void write_u64(std::ostream& out, std::uint64_t value);
std::uint64_t read_u64(std::istream& in);
void write_f64(std::ostream& out, double value);
double read_f64(std::istream& in);

}  // namespace rpf::nn

#endif  // RPF_NEURAL_HPP_

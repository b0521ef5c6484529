#include "rpf/neural.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rpf::nn {

namespace {

Eigen::MatrixXd activate(Activation a, Eigen::MatrixXd z) {
  switch (a) {
    case Activation::ReLU:
      return z.cwiseMax(0.0);
    case Activation::Tanh:
      return z.array().tanh().matrix();
    case Activation::Identity:
      break;
  }
  return z;
}

// Derivative expressed through the post-activation output y.
Eigen::MatrixXd activation_grad(Activation a, const Eigen::MatrixXd& y,
                                const Eigen::MatrixXd& grad_y) {
  switch (a) {
    case Activation::ReLU:
      return (y.array() > 0.0).select(grad_y, 0.0);
    case Activation::Tanh:
      return (grad_y.array() * (1.0 - y.array().square())).matrix();
    case Activation::Identity:
      break;
  }
  return grad_y;
}

}  // namespace

void GradientTape::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : bias) b.setZero();
}

void GradientTape::scale(double factor) {
  for (auto& w : weights) w *= factor;
  for (auto& b : bias) b *= factor;
}

double GradientTape::squared_norm() const {
  double total = 0.0;
  for (const auto& w : weights) total += w.squaredNorm();
  for (const auto& b : bias) total += b.squaredNorm();
  return total;
}

GradientTape& GradientTape::operator+=(const GradientTape& other) {
  if (other.weights.size() != weights.size()) {
    throw std::invalid_argument("GradientTape: shape mismatch");
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    weights[k] += other.weights[k];
    bias[k] += other.bias[k];
  }
  return *this;
}

DenseNet::DenseNet(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    if (l.bias.size() != l.weights.rows()) {
      throw std::invalid_argument("DenseNet: bias size does not match weight rows in layer " +
                                  std::to_string(k));
    }
    if (k > 0 && layers_[k - 1].weights.rows() != l.weights.cols()) {
      throw std::invalid_argument("DenseNet: layer " + std::to_string(k) +
                                  " input width does not match previous output");
    }
  }
}

DenseNet DenseNet::glorot(std::span<const std::size_t> widths, Activation hidden,
                          Activation output, std::mt19937_64& rng) {
  if (widths.size() < 2) throw std::invalid_argument("DenseNet::glorot: need >= 2 widths");
  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    const auto fan_in = static_cast<Eigen::Index>(widths[k]);
    const auto fan_out = static_cast<Eigen::Index>(widths[k + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer;
    layer.weights.resize(fan_out, fan_in);
    // Row-major fill order so the draw sequence is independent of Eigen storage.
    for (Eigen::Index r = 0; r < fan_out; ++r) {
      for (Eigen::Index c = 0; c < fan_in; ++c) layer.weights(r, c) = dist(rng);
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    layer.activation = (k + 2 == widths.size()) ? output : hidden;
    layers.push_back(std::move(layer));
  }
  return DenseNet(std::move(layers));
}

std::size_t DenseNet::input_width() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weights.cols());
}

std::size_t DenseNet::output_width() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weights.rows());
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& input) const {
  if (static_cast<std::size_t>(input.size()) != input_width()) {
    throw std::invalid_argument("DenseNet::forward: input width mismatch");
  }
  Eigen::VectorXd x = input;
  for (const auto& l : layers_) {
    Eigen::VectorXd z = l.weights * x + l.bias;
    x = activate(l.activation, std::move(z));
  }
  return x;
}

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& input, ForwardCache& cache) const {
  return forward_batch(input, cache);
}

Eigen::VectorXd DenseNet::backward(const ForwardCache& cache, const Eigen::VectorXd& grad_output,
                                   GradientTape& tape) const {
  return backward_batch(cache, grad_output, tape);
}

Eigen::MatrixXd DenseNet::forward_batch(const Eigen::MatrixXd& inputs, ForwardCache& cache) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_width()) {
    throw std::invalid_argument("DenseNet::forward: input width mismatch");
  }
  cache.inputs.resize(layers_.size());
  cache.outputs.resize(layers_.size());
  Eigen::MatrixXd x = inputs;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    cache.inputs[k] = x;
    Eigen::MatrixXd z = l.weights * x;
    z.colwise() += l.bias;
    x = activate(l.activation, std::move(z));
    cache.outputs[k] = x;
  }
  return x;
}

Eigen::MatrixXd DenseNet::backward_batch(const ForwardCache& cache,
                                         const Eigen::MatrixXd& grad_outputs,
                                         GradientTape& tape) const {
  if (cache.outputs.size() != layers_.size() || tape.weights.size() != layers_.size()) {
    throw std::invalid_argument("DenseNet::backward: cache or tape does not match network");
  }
  Eigen::MatrixXd grad = grad_outputs;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& l = layers_[k];
    const Eigen::MatrixXd grad_z = activation_grad(l.activation, cache.outputs[k], grad);
    tape.weights[k].noalias() += grad_z * cache.inputs[k].transpose();
    tape.bias[k] += grad_z.rowwise().sum();
    grad.noalias() = l.weights.transpose() * grad_z;
  }
  return grad;
}

GradientTape DenseNet::zero_tape() const {
  GradientTape tape;
  for (const auto& l : layers_) {
    tape.weights.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
    tape.bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
  return tape;
}

bool DenseNet::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

bool operator==(const DenseNet& a, const DenseNet& b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t k = 0; k < a.layers_.size(); ++k) {
    const auto& x = a.layers_[k];
    const auto& y = b.layers_[k];
    if (x.activation != y.activation || x.weights.rows() != y.weights.rows() ||
        x.weights.cols() != y.weights.cols() || x.weights != y.weights || x.bias != y.bias) {
      return false;
    }
  }
  return true;
}

AdamState AdamState::for_net(const DenseNet& net) {
  return {net.zero_tape(), net.zero_tape(), 0};
}

VectorAdamState VectorAdamState::zeros(Eigen::Index size) {
  return {Eigen::VectorXd::Zero(size), Eigen::VectorXd::Zero(size), 0};
}

namespace {

template <typename Param, typename Grad, typename Moment>
void adam_update(Param& p, const Grad& g, Moment& m, Moment& v, double lr, double correction1,
                 double correction2, const AdamConfig& c) {
  m = c.beta1 * m + (1.0 - c.beta1) * g;
  v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
  p.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + c.epsilon);
}

}  // namespace

void adam_step(DenseNet& net, const GradientTape& grad, double lr, AdamState& state,
               const AdamConfig& config) {
  auto& layers = net.layers();
  if (grad.weights.size() != layers.size() || state.first.weights.size() != layers.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  ++state.steps;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.steps));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.steps));
  for (std::size_t k = 0; k < layers.size(); ++k) {
    adam_update(layers[k].weights, grad.weights[k], state.first.weights[k],
                state.second.weights[k], lr, c1, c2, config);
    adam_update(layers[k].bias, grad.bias[k], state.first.bias[k], state.second.bias[k], lr, c1,
                c2, config);
  }
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr,
               VectorAdamState& state, const AdamConfig& config) {
  if (grad.size() != params.size() || state.first.size() != params.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  ++state.steps;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.steps));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.steps));
  adam_update(params, grad, state.first, state.second, lr, c1, c2, config);
}

// --- serialisation -----------------------------------------------------------

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

void write_bytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw std::runtime_error("checkpoint write failed");
}

void read_bytes(std::istream& in, void* data, std::size_t n) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw std::runtime_error("checkpoint truncated");
  }
}

constexpr std::uint64_t kMaxDim = 1u << 20;

std::uint64_t read_dim(std::istream& in) {
  const std::uint64_t d = read_u64(in);
  if (d > kMaxDim) throw std::runtime_error("checkpoint: implausible dimension");
  return d;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  write_u64(out, static_cast<std::uint64_t>(m.rows()));
  write_u64(out, static_cast<std::uint64_t>(m.cols()));
  write_bytes(out, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  const auto rows = static_cast<Eigen::Index>(read_dim(in));
  const auto cols = static_cast<Eigen::Index>(read_dim(in));
  Eigen::MatrixXd m(rows, cols);
  read_bytes(in, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  return m;
}

void write_tape(std::ostream& out, const GradientTape& t) {
  write_u64(out, t.weights.size());
  for (std::size_t k = 0; k < t.weights.size(); ++k) {
    write_matrix(out, t.weights[k]);
    write_vector(out, t.bias[k]);
  }
}

GradientTape read_tape(std::istream& in) {
  GradientTape t;
  const std::uint64_t n = read_dim(in);
  for (std::uint64_t k = 0; k < n; ++k) {
    t.weights.push_back(read_matrix(in));
    t.bias.push_back(read_vector(in));
  }
  return t;
}

}  // namespace

void write_u64(std::ostream& out, std::uint64_t value) { write_bytes(out, &value, sizeof value); }

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t value = 0;
  read_bytes(in, &value, sizeof value);
  return value;
}

void write_f64(std::ostream& out, double value) { write_bytes(out, &value, sizeof value); }

double read_f64(std::istream& in) {
  double value = 0;
  read_bytes(in, &value, sizeof value);
  return value;
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  write_u64(out, static_cast<std::uint64_t>(v.size()));
  write_bytes(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

Eigen::VectorXd read_vector(std::istream& in) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(read_dim(in)));
  read_bytes(in, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  return v;
}

void write_net(std::ostream& out, const DenseNet& net) {
  write_u64(out, net.layers().size());
  for (const auto& l : net.layers()) {
    write_u64(out, static_cast<std::uint64_t>(l.activation));
    write_matrix(out, l.weights);
    write_vector(out, l.bias);
  }
}

DenseNet read_net(std::istream& in) {
  const std::uint64_t n = read_dim(in);
  std::vector<DenseLayer> layers;
  for (std::uint64_t k = 0; k < n; ++k) {
    DenseLayer l;
    const std::uint64_t act = read_u64(in);
    if (act > static_cast<std::uint64_t>(Activation::Tanh)) {
      throw std::runtime_error("checkpoint: unknown activation");
    }
    l.activation = static_cast<Activation>(act);
    l.weights = read_matrix(in);
    l.bias = read_vector(in);
    layers.push_back(std::move(l));
  }
  try {
    return DenseNet(std::move(layers));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("checkpoint: ") + e.what());
  }
}

void write_adam(std::ostream& out, const AdamState& state) {
  write_u64(out, static_cast<std::uint64_t>(state.steps));
  write_tape(out, state.first);
  write_tape(out, state.second);
}

AdamState read_adam(std::istream& in) {
  AdamState s;
  s.steps = static_cast<std::int64_t>(read_u64(in));
  s.first = read_tape(in);
  s.second = read_tape(in);
  return s;
}

void write_adam(std::ostream& out, const VectorAdamState& state) {
  write_u64(out, static_cast<std::uint64_t>(state.steps));
  write_vector(out, state.first);
  write_vector(out, state.second);
}

VectorAdamState read_vector_adam(std::istream& in) {
  VectorAdamState s;
  s.steps = static_cast<std::int64_t>(read_u64(in));
  s.first = read_vector(in);
  s.second = read_vector(in);
  return s;
}

}  // namespace rpf::nn

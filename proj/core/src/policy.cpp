#include "rpf/policy.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rpf {

namespace {

constexpr char kMagic[8] = {'R', 'P', 'F', 'P', 'O', 'L', 'C', 'Y'};
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

// log(1 - tanh(u)^2) without cancellation for large |u|.
double log_one_minus_tanh_sq(double u) {
  const double a = std::abs(u);
  return 2.0 * (std::log(2.0) - a - std::log1p(std::exp(-2.0 * a)));
}

}  // namespace

ActionSpace ActionSpace::for_kind(ActionKind kind) {
  ActionSpace s;
  if (kind == ActionKind::ApfScales) {
    s.low = Eigen::Vector2d(0.0, 0.0);
    s.high = Eigen::Vector2d(0.1, 5.0);
  } else {
    s.low = Eigen::VectorXd::Constant(1, -kMaxSteering);
    s.high = Eigen::VectorXd::Constant(1, kMaxSteering);
  }
  return s;
}

bool ActionSpace::contains(const Eigen::VectorXd& action) const {
  if (action.size() != dim()) return false;
  return (action.array() >= low.array()).all() && (action.array() <= high.array()).all();
}

PolicyBundle PolicyBundle::create(ActionKind kind, std::uint64_t seed,
                                  const PolicyArchitecture& arch) {
  std::mt19937_64 rng(seed);
  PolicyBundle p;
  p.kind = kind;
  p.actions = ActionSpace::for_kind(kind);
  p.encoder = make_encoder(arch.embedding_width, rng);

  std::vector<std::size_t> widths{kLocalWidth + arch.embedding_width};
  for (std::size_t k = 0; k < arch.hidden_layers; ++k) widths.push_back(arch.hidden_width);

  widths.push_back(static_cast<std::size_t>(p.actions.dim()));
  p.actor = nn::DenseNet::glorot(widths, nn::Activation::Tanh, nn::Activation::Identity, rng);
  // Start with means near the box centre.
  p.actor.layers().back().weights *= 0.01;

  widths.back() = 1;
  p.critic = nn::DenseNet::glorot(widths, nn::Activation::Tanh, nn::Activation::Identity, rng);

  p.log_std = Eigen::VectorXd::Constant(p.actions.dim(), std::log(arch.initial_std));
  p.encoder_opt = nn::AdamState::for_net(p.encoder);
  p.actor_opt = nn::AdamState::for_net(p.actor);
  p.critic_opt = nn::AdamState::for_net(p.critic);
  p.log_std_opt = nn::VectorAdamState::zeros(p.log_std.size());
  return p;
}

Eigen::VectorXd PolicyBundle::embed(const ObservationInputs& inputs) const {
  return mean_embed(inputs, encoder);
}

double PolicyBundle::value(const Eigen::VectorXd& embedded) const {
  return critic.forward(embedded)(0);
}

bool PolicyBundle::all_finite() const {
  return encoder.all_finite() && actor.all_finite() && critic.all_finite() && log_std.allFinite();
}

Eigen::VectorXd squash_action(const ActionSpace& space, const Eigen::VectorXd& raw) {
  Eigen::VectorXd a = space.center() + space.half_width().cwiseProduct(raw.array().tanh().matrix());
  // tanh saturates to exactly +-1 for large |u|; keep the result inside the box.
  return a.cwiseMax(space.low).cwiseMin(space.high);
}

double squash_log_det(const ActionSpace& space, const Eigen::VectorXd& raw) {
  double total = 0.0;
  const Eigen::VectorXd hw = space.half_width();
  for (Eigen::Index k = 0; k < raw.size(); ++k) {
    total += std::log(hw(k)) + log_one_minus_tanh_sq(raw(k));
  }
  return total;
}

double gaussian_log_prob(const Eigen::VectorXd& raw, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& log_std) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < raw.size(); ++k) {
    const double z = (raw(k) - mean(k)) * std::exp(-log_std(k));
    total += -0.5 * z * z - log_std(k) - 0.5 * kLog2Pi;
  }
  return total;
}

double gaussian_entropy(const Eigen::VectorXd& log_std) {
  return (log_std.array() + 0.5 + 0.5 * kLog2Pi).sum();
}

ActionSample sample_action(const PolicyBundle& policy, const Eigen::VectorXd& embedded,
                           std::mt19937_64& rng, bool deterministic) {
  const Eigen::VectorXd mean = policy.actor.forward(embedded);
  ActionSample s;
  s.raw = mean;
  if (!deterministic) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index k = 0; k < mean.size(); ++k) {
      s.raw(k) += std::exp(policy.log_std(k)) * normal(rng);
    }
  }
  s.action = squash_action(policy.actions, s.raw);
  s.log_prob = gaussian_log_prob(s.raw, mean, policy.log_std) -
               squash_log_det(policy.actions, s.raw);
  s.value = policy.value(embedded);
  return s;
}

ControlAction to_control_action(ActionKind kind, const Eigen::VectorXd& action) {
  ControlAction c;
  if (kind == ActionKind::ApfScales) {
    c.apf = {action(0), action(1)};
  } else {
    c.steering = action(0);
  }
  return c;
}

PlannerMode planner_mode_for(ActionKind kind) {
  return kind == ActionKind::ApfScales ? PlannerMode::Rpf : PlannerMode::VanillaPpo;
}

PolicyController::PolicyController(const PolicyBundle& policy, const WorldParams& params,
                                   std::uint64_t seed, bool deterministic)
    : policy_(policy), params_(params), rng_(seed), deterministic_(deterministic) {}

ControlAction PolicyController::decide(std::size_t /*robot*/, const Observation& obs) {
  const Eigen::VectorXd x = policy_.embed(normalize_observation(obs, params_));
  const Eigen::VectorXd mean = policy_.actor.forward(x);
  Eigen::VectorXd raw = mean;
  if (!deterministic_) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index k = 0; k < raw.size(); ++k) raw(k) += std::exp(policy_.log_std(k)) * normal(rng_);
  }
  return to_control_action(policy_.kind, squash_action(policy_.actions, raw));
}

void write_policy(std::ostream& out, const PolicyBundle& policy) {
  out.write(kMagic, sizeof kMagic);
  nn::write_u64(out, kCheckpointVersion);
  nn::write_u64(out, static_cast<std::uint64_t>(policy.kind));
  nn::write_net(out, policy.encoder);
  nn::write_net(out, policy.actor);
  nn::write_net(out, policy.critic);
  nn::write_vector(out, policy.log_std);
  nn::write_adam(out, policy.encoder_opt);
  nn::write_adam(out, policy.actor_opt);
  nn::write_adam(out, policy.critic_opt);
  nn::write_adam(out, policy.log_std_opt);
  nn::write_u64(out, static_cast<std::uint64_t>(policy.episodes));
  nn::write_u64(out, static_cast<std::uint64_t>(policy.updates));
  if (!out) throw std::runtime_error("checkpoint write failed");
}

PolicyBundle read_policy(std::istream& in) {
  char magic[sizeof kMagic] = {};
  in.read(magic, sizeof magic);
  if (in.gcount() != sizeof magic || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error("not an rpf policy checkpoint");
  }
  const std::uint64_t version = nn::read_u64(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  PolicyBundle p;
  const std::uint64_t kind = nn::read_u64(in);
  if (kind > static_cast<std::uint64_t>(ActionKind::Steering)) {
    throw std::runtime_error("checkpoint: unknown action kind");
  }
  p.kind = static_cast<ActionKind>(kind);
  p.actions = ActionSpace::for_kind(p.kind);
  p.encoder = nn::read_net(in);
  p.actor = nn::read_net(in);
  p.critic = nn::read_net(in);
  p.log_std = nn::read_vector(in);
  p.encoder_opt = nn::read_adam(in);
  p.actor_opt = nn::read_adam(in);
  p.critic_opt = nn::read_adam(in);
  p.log_std_opt = nn::read_vector_adam(in);
  p.episodes = static_cast<std::int64_t>(nn::read_u64(in));
  p.updates = static_cast<std::int64_t>(nn::read_u64(in));

  if (p.encoder.input_width() != kEncoderInputWidth ||
      p.actor.input_width() != kLocalWidth + p.encoder.output_width() ||
      p.critic.input_width() != p.actor.input_width() ||
      p.actor.output_width() != static_cast<std::size_t>(p.actions.dim()) ||
      p.critic.output_width() != 1 || p.log_std.size() != p.actions.dim()) {
    throw std::runtime_error("checkpoint: network shapes are inconsistent");
  }
  return p;
}

void save_policy(const PolicyBundle& policy, const std::filesystem::path& path) {
  // Write-then-rename so an interrupted save never clobbers a good checkpoint.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    write_policy(out, policy);
  }
  std::filesystem::rename(tmp, path);
}

PolicyBundle load_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return read_policy(in);
}

std::uint64_t parameter_fingerprint(const PolicyBundle& policy) {
  std::ostringstream out(std::ios::binary);
  nn::write_net(out, policy.encoder);
  nn::write_net(out, policy.actor);
  nn::write_net(out, policy.critic);
  nn::write_vector(out, policy.log_std);
  const std::string bytes = out.str();
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace rpf

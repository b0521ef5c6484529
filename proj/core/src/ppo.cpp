#include "rpf/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rpf {

void PpoConfig::validate() const {
  const auto fail = [](const std::string& what) {
    throw std::invalid_argument("ppo config: " + what);
  };
  const auto open_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!(alpha0 > 0.0)) fail("alpha0 must be positive");
  if (!open_unit(beta) && beta != 1.0) fail("beta must lie in (0, 1]");
  if (!open_unit(gamma) && gamma != 1.0) fail("gamma must lie in (0, 1]");
  if (!open_unit(epsilon)) fail("epsilon must lie in (0, 1)");
  if (!(tau >= 0.0 && tau <= 1.0)) fail("tau must lie in [0, 1]");
  if (!(c1 > 0.0)) fail("c1 must be positive");
  if (!(c2 >= 0.0)) fail("c2 must be non-negative");
  if (batch_steps < 1) fail("batch_steps (Z) must be at least 1");
  if (epochs < 1) fail("epochs (K) must be at least 1");
  if (steps_per_episode < 1) fail("steps_per_episode must be at least 1");
  if (episodes < 0) fail("episodes must be non-negative");
  if (minibatch_size < 0) fail("minibatch_size must be non-negative");
  if (!(max_grad_norm >= 0.0)) fail("max_grad_norm must be non-negative");
  if (!(reward_scale > 0.0) || !std::isfinite(reward_scale)) fail("reward_scale must be positive");
}

double lr_schedule(double alpha0, double beta, std::int64_t episode) {
  if (episode < 0) throw std::invalid_argument("lr_schedule: episode must be non-negative");
  return alpha0 * std::pow(beta, static_cast<double>(episode));
}

void RolloutBuffer::add(Transition t) { transitions_.push_back(std::move(t)); }

void RolloutBuffer::set_bootstrap(std::int64_t episode, std::size_t robot, double value) {
  bootstraps_[{episode, robot}] = value;
}

void RolloutBuffer::clear() {
  transitions_.clear();
  bootstraps_.clear();
}

void RolloutBuffer::canonicalize() {
  std::stable_sort(transitions_.begin(), transitions_.end(),
                   [](const Transition& a, const Transition& b) {
                     if (a.episode != b.episode) return a.episode < b.episode;
                     if (a.timestep != b.timestep) return a.timestep < b.timestep;
                     return a.robot_id < b.robot_id;
                   });
}

AdvantageEstimate compute_advantages(const RolloutBuffer& buffer, double gamma, double tau) {
  const std::vector<Transition>& ts = buffer.transitions();
  const auto n = static_cast<Eigen::Index>(ts.size());
  AdvantageEstimate est{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};

  std::map<RolloutBuffer::StreamKey, std::vector<std::size_t>> streams;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    streams[{ts[k].episode, ts[k].robot_id}].push_back(k);
  }

  for (const auto& [key, indices] : streams) {
    const Transition& last = ts[indices.back()];
    double next_value = 0.0;
    if (!last.done) {
      const auto it = buffer.bootstraps().find(key);
      if (it == buffer.bootstraps().end()) {
        throw std::logic_error("compute_advantages: open stream for robot " +
                               std::to_string(key.second) + " has no bootstrap value");
      }
      next_value = it->second;
    }
    double gae = 0.0;
    for (auto pos = indices.size(); pos-- > 0;) {
      const Transition& t = ts[indices[pos]];
      // Only the final transition of a stream can be terminal.
      const double mask = t.done ? 0.0 : 1.0;
      const double delta = t.reward + gamma * next_value * mask - t.value;
      gae = delta + gamma * tau * mask * gae;
      const auto k = static_cast<Eigen::Index>(indices[pos]);
      est.advantages(k) = gae;
      est.returns(k) = gae + t.value;
      next_value = t.value;
    }
  }
  return est;
}

Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& advantages) {
  if (advantages.size() == 0) return advantages;
  const double mean = advantages.mean();
  Eigen::VectorXd centred = advantages.array() - mean;
  if (advantages.size() < 2) return centred;
  const double sd = std::sqrt(centred.squaredNorm() / static_cast<double>(advantages.size()));
  if (!(sd > 1e-12)) return centred;
  return centred / sd;
}

double clipped_surrogate(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

namespace {

struct Snapshot {
  nn::DenseNet encoder, actor, critic;
  Eigen::VectorXd log_std;
  nn::AdamState encoder_opt, actor_opt, critic_opt;
  nn::VectorAdamState log_std_opt;

  explicit Snapshot(const PolicyBundle& p)
      : encoder(p.encoder), actor(p.actor), critic(p.critic), log_std(p.log_std),
        encoder_opt(p.encoder_opt), actor_opt(p.actor_opt), critic_opt(p.critic_opt),
        log_std_opt(p.log_std_opt) {}

  void restore(PolicyBundle& p) const {
    p.encoder = encoder;
    p.actor = actor;
    p.critic = critic;
    p.log_std = log_std;
    p.encoder_opt = encoder_opt;
    p.actor_opt = actor_opt;
    p.critic_opt = critic_opt;
    p.log_std_opt = log_std_opt;
  }
};

// Embeds a minibatch with a single encoder pass over every neighbour column.
struct BatchEmbedding {
  Eigen::MatrixXd x;  // (4 + E) x B
  nn::ForwardCache cache;
  std::vector<Eigen::Index> first;  // first neighbour column per sample
  std::vector<Eigen::Index> count;  // neighbour columns per sample
};

BatchEmbedding embed_batch(const nn::DenseNet& encoder, const std::vector<Transition>& ts,
                           const std::vector<std::size_t>& ids) {
  const auto width = static_cast<Eigen::Index>(encoder.output_width());
  const auto local = static_cast<Eigen::Index>(kLocalWidth);
  const auto b = static_cast<Eigen::Index>(ids.size());
  BatchEmbedding out;
  out.first.resize(ids.size());
  out.count.resize(ids.size());
  Eigen::Index total = 0;
  for (std::size_t s = 0; s < ids.size(); ++s) {
    out.first[s] = total;
    out.count[s] = static_cast<Eigen::Index>(ts[ids[s]].obs.neighbors.size());
    total += out.count[s];
  }
  out.x = Eigen::MatrixXd::Zero(local + width, b);
  Eigen::MatrixXd columns(static_cast<Eigen::Index>(kEncoderInputWidth), total);
  for (std::size_t s = 0; s < ids.size(); ++s) {
    const ObservationInputs& obs = ts[ids[s]].obs;
    out.x.col(static_cast<Eigen::Index>(s)).head(local) = obs.local;
    for (Eigen::Index k = 0; k < out.count[s]; ++k) {
      columns.col(out.first[s] + k) << obs.local, obs.neighbors[static_cast<std::size_t>(k)];
    }
  }
  if (total == 0) return out;
  const Eigen::MatrixXd encoded = encoder.forward_batch(columns, out.cache);
  for (std::size_t s = 0; s < ids.size(); ++s) {
    if (out.count[s] == 0) continue;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(width);
    for (Eigen::Index k = 0; k < out.count[s]; ++k) mean += encoded.col(out.first[s] + k);
    out.x.col(static_cast<Eigen::Index>(s)).tail(width) = mean / static_cast<double>(out.count[s]);
  }
  return out;
}

void embed_batch_backward(const nn::DenseNet& encoder, const BatchEmbedding& emb,
                          const Eigen::MatrixXd& grad_x, nn::GradientTape& tape) {
  const auto width = static_cast<Eigen::Index>(encoder.output_width());
  if (emb.cache.inputs.empty()) return;
  Eigen::MatrixXd grad_cols(width, emb.cache.inputs.front().cols());
  for (std::size_t s = 0; s < emb.count.size(); ++s) {
    if (emb.count[s] == 0) continue;
    const Eigen::VectorXd g = grad_x.col(static_cast<Eigen::Index>(s)).tail(width) /
                              static_cast<double>(emb.count[s]);
    for (Eigen::Index k = 0; k < emb.count[s]; ++k) grad_cols.col(emb.first[s] + k) = g;
  }
  encoder.backward_batch(emb.cache, grad_cols, tape);
}

}  // namespace

UpdateStats ppo_update(PolicyBundle& policy, RolloutBuffer& buffer, const PpoConfig& config,
                       double lr, std::mt19937_64& rng) {
  if (buffer.empty()) throw std::invalid_argument("ppo_update: empty buffer");
  const std::vector<Transition>& ts = buffer.transitions();
  const std::size_t n = ts.size();

  const AdvantageEstimate est = compute_advantages(buffer, config.gamma, config.tau);
  const Eigen::VectorXd adv = normalize_advantages(est.advantages);

  const Snapshot backup(policy);
  UpdateStats stats;
  stats.samples = n;

  const std::size_t mb = config.minibatch_size <= 0
                             ? n
                             : std::min(n, static_cast<std::size_t>(config.minibatch_size));
  const auto dim = policy.actions.dim();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  double sum_policy = 0.0, sum_value = 0.0, sum_kl = 0.0, sum_clipped = 0.0;
  std::size_t seen = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (mb < n) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += mb) {
      const std::vector<std::size_t> ids(
          order.begin() + static_cast<std::ptrdiff_t>(start),
          order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + mb)));
      const auto b = static_cast<Eigen::Index>(ids.size());
      const double inv_b = 1.0 / static_cast<double>(b);

      BatchEmbedding emb = embed_batch(policy.encoder, ts, ids);
      nn::ForwardCache actor_cache, critic_cache;
      const Eigen::MatrixXd mean = policy.actor.forward_batch(emb.x, actor_cache);
      const Eigen::MatrixXd values = policy.critic.forward_batch(emb.x, critic_cache);

      const Eigen::ArrayXd inv_var = (-2.0 * policy.log_std.array()).exp();
      Eigen::MatrixXd grad_mean = Eigen::MatrixXd::Zero(dim, b);
      Eigen::VectorXd grad_log_std = Eigen::VectorXd::Zero(dim);
      Eigen::MatrixXd grad_values(1, b);
      double policy_loss = 0.0, value_loss = 0.0;

      for (Eigen::Index s = 0; s < b; ++s) {
        const Transition& t = ts[ids[static_cast<std::size_t>(s)]];
        const auto k = static_cast<Eigen::Index>(ids[static_cast<std::size_t>(s)]);
        const Eigen::VectorXd mu = mean.col(s);
        const double lp_new =
            gaussian_log_prob(t.raw, mu, policy.log_std) - squash_log_det(policy.actions, t.raw);
        const double log_ratio = lp_new - t.log_prob;
        const double ratio = std::exp(log_ratio);
        const double a = adv(k);
        const double surrogate = clipped_surrogate(ratio, a, config.epsilon);
        policy_loss -= surrogate * inv_b;
        sum_kl += (ratio - 1.0) - log_ratio;
        if (std::abs(ratio - 1.0) > config.epsilon) sum_clipped += 1.0;

        // d(-surrogate)/d(lp_new): zero when the clipped branch is the min.
        if (ratio * a <= std::clamp(ratio, 1.0 - config.epsilon, 1.0 + config.epsilon) * a) {
          const double g = -ratio * a * inv_b;
          const Eigen::ArrayXd diff = (t.raw - mu).array();
          grad_mean.col(s) = (g * diff * inv_var).matrix();
          grad_log_std.array() += g * (diff.square() * inv_var - 1.0);
        }

        const double err = values(0, s) - est.returns(k);
        value_loss += err * err * inv_b;
        grad_values(0, s) = config.c1 * 2.0 * err * inv_b;
      }
      const double entropy = gaussian_entropy(policy.log_std);
      grad_log_std.array() -= config.c2;
      const double total = policy_loss + config.c1 * value_loss - config.c2 * entropy;

      if (!std::isfinite(total)) {
        backup.restore(policy);
        buffer.clear();
        stats.aborted = true;
        stats.total_loss = total;
        return stats;
      }

      nn::GradientTape actor_tape = policy.actor.zero_tape();
      nn::GradientTape critic_tape = policy.critic.zero_tape();
      nn::GradientTape encoder_tape = policy.encoder.zero_tape();
      Eigen::MatrixXd grad_x = policy.actor.backward_batch(actor_cache, grad_mean, actor_tape);
      grad_x += policy.critic.backward_batch(critic_cache, grad_values, critic_tape);
      embed_batch_backward(policy.encoder, emb, grad_x, encoder_tape);

      const double norm = std::sqrt(actor_tape.squared_norm() + critic_tape.squared_norm() +
                                    encoder_tape.squared_norm() + grad_log_std.squaredNorm());
      stats.grad_norm = norm;
      if (!std::isfinite(norm)) {
        backup.restore(policy);
        buffer.clear();
        stats.aborted = true;
        stats.total_loss = total;
        return stats;
      }
      if (config.max_grad_norm > 0.0 && norm > config.max_grad_norm) {
        const double f = config.max_grad_norm / norm;
        actor_tape.scale(f);
        critic_tape.scale(f);
        encoder_tape.scale(f);
        grad_log_std *= f;
      }

      nn::adam_step(policy.actor, actor_tape, lr, policy.actor_opt);
      nn::adam_step(policy.critic, critic_tape, lr, policy.critic_opt);
      nn::adam_step(policy.encoder, encoder_tape, lr, policy.encoder_opt);
      nn::adam_step(policy.log_std, grad_log_std, lr, policy.log_std_opt);

      sum_policy += policy_loss * static_cast<double>(b);
      sum_value += value_loss * static_cast<double>(b);
      seen += static_cast<std::size_t>(b);
      stats.entropy = entropy;
      ++stats.gradient_steps;
    }
  }

  if (!policy.all_finite()) {
    backup.restore(policy);
    buffer.clear();
    stats.aborted = true;
    return stats;
  }

  const double denom = static_cast<double>(seen);
  stats.policy_loss = sum_policy / denom;
  stats.value_loss = sum_value / denom;
  stats.total_loss = stats.policy_loss + config.c1 * stats.value_loss - config.c2 * stats.entropy;
  stats.approx_kl = sum_kl / denom;
  stats.clip_fraction = sum_clipped / denom;
  ++policy.updates;
  buffer.clear();
  return stats;
}

}  // namespace rpf

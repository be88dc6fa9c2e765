#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rewardlab/ppo/mlp.hpp"

namespace rewardlab::ppo {

// Actor and critic networks plus the state-independent Gaussian log-std.
// Discrete policies are categorical over the actor's logits; continuous
// policies sample u ~ N(mu, sigma) and act with tanh(u).
template <typename Scalar>
struct ActorCritic {
  using Matrix = typename Mlp<Scalar>::Matrix;
  using Vector = typename Mlp<Scalar>::Vector;

  bool discrete = true;
  int action_dim = 7;
  Mlp<Scalar> actor;
  Mlp<Scalar> critic;
  Vector log_std;
  Vector log_std_grad;

  ActorCritic() = default;
  ActorCritic(int obs_dim, int action_dim_, bool discrete_, int hidden, Rng& rng)
      : discrete(discrete_),
        action_dim(action_dim_),
        actor({obs_dim, hidden, hidden, action_dim_}),
        critic({obs_dim, hidden, hidden, 1}),
        log_std(Vector::Zero(discrete_ ? 0 : action_dim_)),
        log_std_grad(Vector::Zero(discrete_ ? 0 : action_dim_)) {
    actor.init_orthogonal(rng, Scalar(std::sqrt(2.0)), Scalar(0.01));
    critic.init_orthogonal(rng, Scalar(std::sqrt(2.0)), Scalar(1.0));
  }

  void zero_grad() {
    actor.zero_grad();
    critic.zero_grad();
    log_std_grad.setZero();
  }

  double grad_norm() const {
    return std::sqrt(static_cast<double>(actor.grads().squaredNorm() + critic.grads().squaredNorm() +
                                         log_std_grad.squaredNorm()));
  }

  void scale_grads(Scalar s) {
    actor.grads() *= s;
    critic.grads() *= s;
    log_std_grad *= s;
  }
};

template <typename Scalar>
struct Batch {
  using Matrix = typename Mlp<Scalar>::Matrix;
  Matrix obs;                      // obs_dim x B
  std::vector<int> actions;        // discrete
  Matrix raw_actions;              // action_dim x B, pre-tanh samples
  std::vector<double> old_logp;
  std::vector<double> advantages;
  std::vector<double> returns;

  int size() const { return static_cast<int>(obs.cols()); }
};

struct LossCoefs {
  double clip = 0.2;
  double entropy = 0.0;
  double value = 0.5;
};

struct LossStats {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Diagonal Gaussian log-density of u (the tanh correction does not depend on
// the parameters, so it is left out of the ratio).
template <typename Scalar, typename ColU, typename ColMu>
double gaussian_logp(const ColU& u, const ColMu& mu, const typename Mlp<Scalar>::Vector& log_std) {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double s = std::exp(static_cast<double>(log_std[i]));
    const double z = (static_cast<double>(u[i]) - static_cast<double>(mu[i])) / s;
    lp += -0.5 * z * z - static_cast<double>(log_std[i]) - kLogSqrt2Pi;
  }
  return lp;
}

// log(1 - tanh(u)^2), summed over dimensions.
template <typename Col>
double tanh_log_jacobian(const Col& u) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double t = std::tanh(static_cast<double>(u[i]));
    s += std::log(1.0 - t * t + 1e-6);
  }
  return s;
}

template <typename Col>
std::vector<double> log_softmax(const Col& logits) {
  double mx = -INFINITY;
  for (Eigen::Index i = 0; i < logits.size(); ++i) mx = std::max(mx, static_cast<double>(logits[i]));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) sum += std::exp(static_cast<double>(logits[i]) - mx);
  const double lse = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) out[i] = static_cast<double>(logits[i]) - lse;
  return out;
}

// Clipped-surrogate PPO loss, value loss and entropy bonus, averaged over the
// batch. When with_grads is set, gradients are accumulated into the model.
template <typename Scalar>
LossStats ppo_loss(ActorCritic<Scalar>& model, const Batch<Scalar>& batch, const LossCoefs& coefs,
                   bool with_grads) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  const int n = batch.size();
  const double inv_n = 1.0 / n;
  typename Mlp<Scalar>::Cache actor_cache, critic_cache;
  const Matrix out = model.actor.forward(batch.obs, actor_cache);
  const Matrix values = model.critic.forward(batch.obs, critic_cache);
  Matrix d_out = Matrix::Zero(out.rows(), n);
  Matrix d_values = Matrix::Zero(1, n);

  LossStats st;
  const double ent_const = model.discrete ? 0.0 : 0.5 + kLogSqrt2Pi;
  for (int b = 0; b < n; ++b) {
    double logp = 0.0;
    double entropy = 0.0;
    std::vector<double> lsm;
    if (model.discrete) {
      lsm = log_softmax(out.col(b));
      logp = lsm[batch.actions[b]];
      for (double l : lsm) entropy -= std::exp(l) * l;
    } else {
      logp = gaussian_logp<Scalar>(batch.raw_actions.col(b), out.col(b), model.log_std);
      for (Eigen::Index i = 0; i < model.log_std.size(); ++i) entropy += model.log_std[i] + ent_const;
    }
    const double adv = batch.advantages[b];
    const double log_ratio = logp - batch.old_logp[b];
    const double ratio = std::exp(log_ratio);
    const double clipped = std::clamp(ratio, 1.0 - coefs.clip, 1.0 + coefs.clip);
    const double surr1 = ratio * adv;
    const double surr2 = clipped * adv;
    st.policy += -std::min(surr1, surr2) * inv_n;
    st.entropy += entropy * inv_n;
    st.approx_kl += ((ratio - 1.0) - log_ratio) * inv_n;
    st.clip_fraction += (std::abs(ratio - 1.0) > coefs.clip ? 1.0 : 0.0) * inv_n;
    const double v_err = static_cast<double>(values(0, b)) - batch.returns[b];
    st.value += 0.5 * v_err * v_err * inv_n;

    if (!with_grads) continue;
    const double d_logp = surr1 <= surr2 ? -adv * ratio * inv_n : 0.0;
    if (model.discrete) {
      for (int k = 0; k < out.rows(); ++k) {
        const double p = std::exp(lsm[k]);
        const double onehot = k == batch.actions[b] ? 1.0 : 0.0;
        // d(-H)/dlogit_k = p_k (log p_k + H)
        const double g = d_logp * (onehot - p) + coefs.entropy * inv_n * p * (lsm[k] + entropy);
        d_out(k, b) = static_cast<Scalar>(g);
      }
    } else {
      for (int k = 0; k < out.rows(); ++k) {
        const double s = std::exp(static_cast<double>(model.log_std[k]));
        const double z = (static_cast<double>(batch.raw_actions(k, b)) - static_cast<double>(out(k, b))) / s;
        d_out(k, b) = static_cast<Scalar>(d_logp * z / s);
        model.log_std_grad[k] += static_cast<Scalar>(d_logp * (z * z - 1.0) - coefs.entropy * inv_n);
      }
    }
    d_values(0, b) = static_cast<Scalar>(coefs.value * v_err * inv_n);
  }
  st.total = st.policy - coefs.entropy * st.entropy + coefs.value * st.value;
  if (with_grads) {
    model.actor.backward(actor_cache, d_out);
    model.critic.backward(critic_cache, d_values);
  }
  return st;
}

}  // namespace rewardlab::ppo

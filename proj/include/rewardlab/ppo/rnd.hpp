#pragma once

#include <algorithm>
#include <vector>

#include "rewardlab/ppo/adam.hpp"
#include "rewardlab/ppo/mlp.hpp"
#include "rewardlab/ppo/normalizer.hpp"

namespace rewardlab::ppo {

// Random network distillation: a frozen random target network and a predictor
// trained online to match it. The bonus is the prediction error divided by the
// running std of past errors; the std is refreshed by update_normalization().
class Rnd {
 public:
  using Matrix = Mlp<float>::Matrix;

  Rnd() = default;
  Rnd(int input_size, std::uint64_t seed, double lr = 1e-4)
      : target_({input_size, 256, 256, 128}, Activation::Relu),
        predictor_({input_size, 256, 256, 128}, Activation::Relu) {
    Rng target_rng(derive_seed(seed, 71));
    Rng predictor_rng(derive_seed(seed, 72));
    target_.init_orthogonal(target_rng, 1.414f, 1.0f);
    predictor_.init_orthogonal(predictor_rng, 1.414f, 1.0f);
    opt_ = Adam<float>(predictor_.params().size(), lr);
  }

  // Squared error between predictor and target embeddings (mean over outputs).
  double prediction_error(const std::vector<float>& obs) const {
    const Matrix x = column(obs);
    return (predictor_.forward(x) - target_.forward(x)).squaredNorm() / 128.0;
  }

  // Returns the normalized bonus for obs, then takes one predictor step toward the target.
  double bonus(const std::vector<float>& obs) {
    const Matrix x = column(obs);
    const Matrix target = target_.forward(x);
    Mlp<float>::Cache cache;
    const Matrix diff = predictor_.forward(x, cache) - target;
    const double err = diff.squaredNorm() / 128.0;
    predictor_.zero_grad();
    predictor_.backward(cache, diff * (2.0f / 128.0f));
    opt_.step(predictor_.params(), predictor_.grads());
    pending_.push_back(err);
    return err / scale();
  }

  void update_normalization() {
    for (double e : pending_) stats_.update(e);
    pending_.clear();
  }

  double scale() const { return stats_.count() >= 2 ? std::max(stats_.stddev(), 1e-8) : 1.0; }
  const Mlp<float>& target() const { return target_; }
  const Mlp<float>& predictor() const { return predictor_; }

 private:
  static Matrix column(const std::vector<float>& obs) {
    return Eigen::Map<const Matrix>(obs.data(), static_cast<Eigen::Index>(obs.size()), 1);
  }

  Mlp<float> target_;
  Mlp<float> predictor_;
  Adam<float> opt_;
  RunningScalar stats_;
  std::vector<double> pending_;
};

}  // namespace rewardlab::ppo

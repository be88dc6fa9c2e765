#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace rewardlab::ppo {

template <typename Scalar>
class Adam {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Adam() = default;
  Adam(Eigen::Index size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-5)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(Vector::Zero(size)), v_(Vector::Zero(size)) {}

  void step(Vector& params, const Vector& grads) {
    ++t_;
    m_ = Scalar(beta1_) * m_ + Scalar(1 - beta1_) * grads;
    v_ = Scalar(beta2_) * v_ + Scalar(1 - beta2_) * grads.cwiseProduct(grads);
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    const Scalar step_size = Scalar(lr_ / c1);
    const Scalar inv_c2 = Scalar(1.0 / std::sqrt(c2));
    params.array() -= step_size * m_.array() / (v_.array().sqrt() * inv_c2 + Scalar(eps_));
  }

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  long steps() const { return t_; }

 private:
  double lr_ = 3e-4;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-5;
  long t_ = 0;
  Vector m_;
  Vector v_;
};

}  // namespace rewardlab::ppo

#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "rewardlab/errors.hpp"
#include "rewardlab/rng.hpp"

namespace rewardlab::ppo {

enum class Activation { Tanh, Relu };

// Fully connected network with all parameters in one flat vector.
// Batches are column-major: one sample per column.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;

  struct Cache {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> outputs;  // post-activation output of each hidden layer
  };

  Mlp() = default;

  Mlp(std::vector<int> sizes, Activation act = Activation::Tanh) : sizes_(std::move(sizes)), act_(act) {
    require(sizes_.size() >= 2, "Mlp needs at least an input and an output size");
    Eigen::Index total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      w_off_.push_back(total);
      total += static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1];
      b_off_.push_back(total);
      total += sizes_[l + 1];
    }
    params_ = Vector::Zero(total);
    grads_ = Vector::Zero(total);
  }

  // Orthogonal weights (gain per layer), zero biases.
  void init_orthogonal(Rng& rng, Scalar hidden_gain, Scalar output_gain) {
    for (int l = 0; l < layers(); ++l) {
      const int rows = sizes_[l + 1], cols = sizes_[l];
      Eigen::MatrixXd g(std::max(rows, cols), std::min(rows, cols));
      for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
      // Sign fix so the distribution is uniform over orthogonal matrices.
      Eigen::MatrixXd r = qr.matrixQR().topRows(g.cols()).template triangularView<Eigen::Upper>();
      for (Eigen::Index j = 0; j < q.cols(); ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
      const double gain = l + 1 == layers() ? output_gain : hidden_gain;
      Eigen::MatrixXd w = rows >= cols ? q : Eigen::MatrixXd(q.transpose());
      weight(l) = (gain * w).template cast<Scalar>();
      bias(l).setZero();
    }
  }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  void init_uniform(Rng& rng) {
    for (int l = 0; l < layers(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
      auto w = weight(l);
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(rng.uniform(-bound, bound));
      auto b = bias(l);
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = static_cast<Scalar>(rng.uniform(-bound, bound));
    }
  }

  int layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }

  Vector& params() { return params_; }
  const Vector& params() const { return params_; }
  Vector& grads() { return grads_; }
  const Vector& grads() const { return grads_; }
  void zero_grad() { grads_.setZero(); }

  MatrixMap weight(int l) { return MatrixMap(params_.data() + w_off_[l], sizes_[l + 1], sizes_[l]); }
  ConstMatrixMap weight(int l) const {
    return ConstMatrixMap(params_.data() + w_off_[l], sizes_[l + 1], sizes_[l]);
  }
  VectorMap bias(int l) { return VectorMap(params_.data() + b_off_[l], sizes_[l + 1]); }
  ConstVectorMap bias(int l) const { return ConstVectorMap(params_.data() + b_off_[l], sizes_[l + 1]); }

  Matrix forward(const Matrix& x) const {
    Matrix h = x;
    for (int l = 0; l < layers(); ++l) {
      Matrix z = (weight(l) * h).colwise() + bias(l);
      h = l + 1 == layers() ? std::move(z) : activate(z);
    }
    return h;
  }

  Matrix forward(const Matrix& x, Cache& cache) const {
    cache.inputs.clear();
    cache.outputs.clear();
    Matrix h = x;
    for (int l = 0; l < layers(); ++l) {
      cache.inputs.push_back(h);
      Matrix z = (weight(l) * h).colwise() + bias(l);
      if (l + 1 == layers()) return z;
      h = activate(z);
      cache.outputs.push_back(h);
    }
    return h;
  }

  // Accumulates d(loss)/d(params) into grads(); returns d(loss)/d(input).
  Matrix backward(const Cache& cache, const Matrix& d_out) {
    Matrix delta = d_out;
    for (int l = layers() - 1; l >= 0; --l) {
      MatrixMap gw(grads_.data() + w_off_[l], sizes_[l + 1], sizes_[l]);
      VectorMap gb(grads_.data() + b_off_[l], sizes_[l + 1]);
      gw.noalias() += delta * cache.inputs[l].transpose();
      gb.noalias() += delta.rowwise().sum();
      Matrix d_in = weight(l).transpose() * delta;
      if (l > 0) {
        const Matrix& y = cache.outputs[l - 1];
        if (act_ == Activation::Tanh) d_in.array() *= (Scalar(1) - y.array().square());
        else d_in.array() *= (y.array() > Scalar(0)).template cast<Scalar>();
      }
      delta = std::move(d_in);
    }
    return delta;
  }

 private:
  Matrix activate(const Matrix& z) const {
    if (act_ == Activation::Tanh) return z.array().tanh().matrix();
    return z.array().max(Scalar(0)).matrix();
  }

  std::vector<int> sizes_;
  Activation act_ = Activation::Tanh;
  std::vector<Eigen::Index> w_off_;
  std::vector<Eigen::Index> b_off_;
  Vector params_;
  Vector grads_;
};

}  // namespace rewardlab::ppo

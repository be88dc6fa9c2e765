#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace rewardlab::ppo {

// Per-dimension running mean/variance (Welford).
class RunningMeanStd {
 public:
  RunningMeanStd() = default;
  explicit RunningMeanStd(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  void update(const std::vector<double>& x) {
    count_ += 1.0;
    for (std::size_t i = 0; i < mean_.size(); ++i) {
      const double delta = x[i] - mean_[i];
      mean_[i] += delta / count_;
      m2_[i] += delta * (x[i] - mean_[i]);
    }
  }

  double count() const { return count_; }
  const std::vector<double>& mean() const { return mean_; }
  double variance(std::size_t i) const { return count_ > 1.0 ? m2_[i] / count_ : 1.0; }
  double stddev(std::size_t i) const { return std::sqrt(variance(i)); }

  std::vector<double> normalize(const std::vector<double>& x, double clip = 10.0) const {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      out[i] = std::clamp((x[i] - mean_[i]) / std::sqrt(variance(i) + 1e-8), -clip, clip);
    return out;
  }

 private:
  double count_ = 0.0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

// Scalar running statistics (Welford).
class RunningScalar {
 public:
  void update(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  long count() const { return n_; }
  double mean() const { return mean_; }
  double stddev() const { return n_ > 1 ? std::sqrt(m2_ / static_cast<double>(n_ - 1)) : 0.0; }

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace rewardlab::ppo

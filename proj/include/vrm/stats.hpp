#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace vrm {

/// A Monte-Carlo value with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double std_error() const noexcept {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }
  Estimate estimate() const noexcept { return {mean_, std_error()}; }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline Estimate mean_estimate(std::span<const double> values) {
  RunningStats s;
  for (double v : values) s.add(v);
  return s.estimate();
}

/// Standard error of a Bernoulli frequency p over `trials` draws.
inline double binomial_se(double p, std::size_t trials) {
  return trials == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace vrm

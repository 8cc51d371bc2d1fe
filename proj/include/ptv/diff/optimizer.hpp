#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ptv::diff {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 5.0;  // global gradient-norm clip; <= 0 disables
};

// Adaptive-moment gradient descent with global-norm gradient clipping.
class Adam {
 public:
  Adam(std::size_t n, const AdamConfig& cfg);

  void step(std::span<double> params, std::span<const double> grad);

  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }
  long step_count() const { return t_; }
  void restore(std::span<const double> m, std::span<const double> v, long t);

 private:
  AdamConfig cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

}  // namespace ptv::diff

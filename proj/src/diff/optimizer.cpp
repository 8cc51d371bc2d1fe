#include "ptv/diff/optimizer.hpp"

#include <cmath>

#include "ptv/common/error.hpp"

namespace ptv::diff {

Adam::Adam(std::size_t n, const AdamConfig& cfg)
    : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw DomainError("Adam::step: size mismatch");
  }
  double scale = 1.0;
  if (cfg_.clip_norm > 0.0) {
    double norm_sq = 0.0;
    for (const double g : grad) norm_sq += g * g;
    const double norm = std::sqrt(norm_sq);
    if (norm > cfg_.clip_norm) scale = cfg_.clip_norm / norm;
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    const double g = grad[i] * scale;
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g * g;
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
}

void Adam::restore(std::span<const double> m, std::span<const double> v, long t) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw DomainError("Adam::restore: size mismatch");
  }
  std::copy(m.begin(), m.end(), m_.begin());
  std::copy(v.begin(), v.end(), v_.begin());
  t_ = t;
}

}  // namespace ptv::diff

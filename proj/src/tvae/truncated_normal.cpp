#include "ptv/tvae/truncated_normal.hpp"

#include <algorithm>
#include <cmath>

#include "ptv/common/error.hpp"
#include "ptv/common/math.hpp"

namespace ptv::tvae {

namespace {

struct Standardized {
  double alpha, beta, mass;  // mass = Phi(beta) - Phi(alpha)
};

Standardized standardize(const TruncatedNormalSpec& tn) {
  const double alpha = (tn.lower - tn.mu) / tn.sigma;
  const double beta = (tn.upper - tn.mu) / tn.sigma;
  // erf differences keep precision when both tails are far from the bounds
  const double mass = 0.5 * (std::erf(beta / math::kSqrt2) -
                             std::erf(alpha / math::kSqrt2));
  return {alpha, beta, mass};
}

}  // namespace

void validate_spec(const TruncatedNormalSpec& tn) {
  if (!(tn.sigma > 0.0)) throw DomainError("truncated normal: sigma must be positive");
  if (!(tn.lower < tn.upper)) throw DomainError("truncated normal: lower must be < upper");
}

double tn_pdf(const TruncatedNormalSpec& tn, double x) {
  validate_spec(tn);
  if (x < tn.lower || x > tn.upper) return 0.0;
  const Standardized s = standardize(tn);
  return math::norm_pdf((x - tn.mu) / tn.sigma) / (tn.sigma * s.mass);
}

double tn_cdf(const TruncatedNormalSpec& tn, double x) {
  validate_spec(tn);
  if (x <= tn.lower) return 0.0;
  if (x >= tn.upper) return 1.0;
  const Standardized s = standardize(tn);
  const double z = (x - tn.mu) / tn.sigma;
  const double c = 0.5 * (std::erf(z / math::kSqrt2) -
                          std::erf(s.alpha / math::kSqrt2)) / s.mass;
  return std::clamp(c, 0.0, 1.0);
}

TnMoments tn_moments(const TruncatedNormalSpec& tn) {
  validate_spec(tn);
  const Standardized s = standardize(tn);
  const double pa = math::norm_pdf(s.alpha);
  const double pb = math::norm_pdf(s.beta);
  const double dphi = (pa - pb) / s.mass;
  const double t = (s.alpha * pa - s.beta * pb) / s.mass;
  TnMoments m;
  m.mean = tn.mu + tn.sigma * dphi;
  m.variance = tn.sigma * tn.sigma * (1.0 + t - dphi * dphi);
  return m;
}

double tn_quantile(const TruncatedNormalSpec& tn, double p) {
  validate_spec(tn);
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("tn_quantile: p must lie strictly inside (0, 1)");
  }
  const Standardized s = standardize(tn);
  const double pa = math::norm_cdf(s.alpha);
  const double target = pa + p * s.mass;
  const double z = math::norm_quantile(std::clamp(target, 1e-300, 1.0 - 1e-16));
  return std::clamp(tn.mu + tn.sigma * z, tn.lower, tn.upper);
}

double tn_entropy(const TruncatedNormalSpec& tn) {
  validate_spec(tn);
  const Standardized s = standardize(tn);
  const double pa = math::norm_pdf(s.alpha);
  const double pb = math::norm_pdf(s.beta);
  static const double kHalfLog2PiE = 1.41893853320467274178;  // 0.5*log(2*pi*e)
  return kHalfLog2PiE + std::log(tn.sigma * s.mass) +
         (s.alpha * pa - s.beta * pb) / (2.0 * s.mass);
}

double tn_sample(const TruncatedNormalSpec& tn, double u) {
  validate_spec(tn);
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("tn_sample: u must lie strictly inside (0, 1)");
  }
  const Standardized s = standardize(tn);
  if (s.mass < 1e-12) {
    // vanishing in-interval mass: collapse to the nearer bound
    return std::clamp(tn.mu, tn.lower, tn.upper);
  }
  return tn_quantile(tn, u);
}

double kl_tn_uniform(const TruncatedNormalSpec& tn, double lower, double upper) {
  validate_spec(tn);
  if (tn.lower < lower - 1e-12 || tn.upper > upper + 1e-12) {
    throw DomainError("kl_tn_uniform: TN support exceeds the uniform support");
  }
  return -tn_entropy(tn) + std::log(upper - lower);
}

namespace {

diff::Value norm_pdf_taped(const diff::Value& x) {
  static const double kInvSqrt2Pi = 0.39894228040143267794;
  return kInvSqrt2Pi * diff::exp(-0.5 * square(x));
}

}  // namespace

diff::Value tn_sample_taped(diff::Tape& tape, const diff::Value& mu,
                            const diff::Value& sigma, double lower,
                            double upper, double u) {
  (void)tape;
  const diff::Value alpha = (lower - mu) / sigma;
  const diff::Value beta = (upper - mu) / sigma;
  const diff::Value pa = diff::norm_cdf(alpha);
  const diff::Value pb = diff::norm_cdf(beta);
  const diff::Value target = pa + u * (pb - pa);
  const diff::Value z = diff::norm_quantile(target);
  return clamp(mu + sigma * z, lower, upper);
}

diff::Value kl_tn_uniform_taped(diff::Tape& tape, const diff::Value& mu,
                                const diff::Value& sigma, double lower,
                                double upper) {
  (void)tape;
  const diff::Value alpha = (lower - mu) / sigma;
  const diff::Value beta = (upper - mu) / sigma;
  const diff::Value mass = 0.5 * (diff::erf(beta * (1.0 / math::kSqrt2)) -
                                  diff::erf(alpha * (1.0 / math::kSqrt2)));
  const diff::Value pa = norm_pdf_taped(alpha);
  const diff::Value pb = norm_pdf_taped(beta);
  static const double kHalfLog2PiE = 1.41893853320467274178;
  const diff::Value entropy = kHalfLog2PiE + diff::log(sigma * mass) +
                              (alpha * pa - beta * pb) / (2.0 * mass);
  return std::log(upper - lower) - entropy;
}

double scale_to_physical(double z_norm, const VariableInfo& info) {
  return info.lower + z_norm * (info.upper - info.lower);
}

double scale_to_normalized(double z_phys, const VariableInfo& info) {
  return (z_phys - info.lower) / (info.upper - info.lower);
}

}  // namespace ptv::tvae

#include "ptv/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ptv/common/error.hpp"

namespace ptv::metrics {

double rmse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw DomainError("rmse: inputs must be equal-length and non-empty");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

double r2(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size() || pred.size() < 2) {
    throw DomainError("r2: need equal-length inputs with at least two samples");
  }
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (!(ss_tot > 0.0)) throw DomainError("r2: truth variance is zero");
  return 1.0 - ss_res / ss_tot;
}

double mpiw(std::span<const IntervalEstimate> intervals) {
  if (intervals.empty()) throw DomainError("mpiw: no intervals");
  double acc = 0.0;
  for (const IntervalEstimate& iv : intervals) acc += iv.upper - iv.lower;
  return acc / static_cast<double>(intervals.size());
}

double picp(std::span<const IntervalEstimate> intervals,
            std::span<const double> truth) {
  if (intervals.size() != truth.size() || intervals.empty()) {
    throw DomainError("picp: inputs must be equal-length and non-empty");
  }
  std::size_t covered = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= intervals[i].lower && truth[i] <= intervals[i].upper) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(truth.size());
}

namespace {

double percentile(std::vector<double>& sorted, double p) {
  // linear interpolation between order statistics
  const double h = p * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

IntervalEstimate ccc_posterior(const tvae::LatentPosterior& posterior,
                               int n_samples, Rng& rng) {
  if (n_samples < 100) throw DomainError("ccc_posterior: need at least 100 samples");
  const tvae::TruncatedNormalSpec& lai = posterior.vars[kLai];
  const tvae::TruncatedNormalSpec& cab = posterior.vars[kCab];
  std::vector<double> products(n_samples);
  double mean = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double z_lai = tvae::tn_sample(lai, rng.uniform01());
    const double z_cab = tvae::tn_sample(cab, rng.uniform01());
    products[i] = z_lai * z_cab;
    mean += products[i];
  }
  mean /= n_samples;
  std::sort(products.begin(), products.end());
  IntervalEstimate out;
  out.mean = mean;
  out.lower = percentile(products, 0.025);
  out.upper = percentile(products, 0.975);
  return out;
}

}  // namespace ptv::metrics

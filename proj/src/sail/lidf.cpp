#include <cmath>

#include "ptv/common/error.hpp"
#include "ptv/sail/sail.hpp"

namespace ptv::sail {

const std::array<double, kLidfClasses> kLidfMidDeg = {
    5, 15, 25, 35, 45, 55, 65, 75, 81, 83, 85, 87, 89};
const std::array<double, kLidfClasses> kLidfLowerDeg = {
    0, 10, 20, 30, 40, 50, 60, 70, 80, 82, 84, 86, 88};
const std::array<double, kLidfClasses> kLidfUpperDeg = {
    10, 20, 30, 40, 50, 60, 70, 80, 82, 84, 86, 88, 90};

namespace {

double excentricity(double ala_deg) {
  return std::exp(((-1.6184e-5 * ala_deg + 2.1145e-3) * ala_deg - 1.2390e-1) *
                      ala_deg +
                  3.2491);
}

// Integral of the (unnormalized) ellipsoidal inclination density over
// [lo, hi]; closed-form antiderivative evaluated at the class edges.
double ellipsoid_bin(double excent, double lo_deg, double hi_deg) {
  auto xedge = [&](double deg) {
    if (deg >= 90.0) return 0.0;
    const double tl = deg * M_PI / 180.0;
    const double tanv = std::tan(tl);
    return excent / std::sqrt(1.0 + excent * excent * tanv * tanv);
  };
  const double x1 = xedge(lo_deg);
  const double x2 = xedge(hi_deg);
  if (std::fabs(excent - 1.0) < 1e-9) {
    return std::fabs(std::cos(lo_deg * M_PI / 180.0) -
                     std::cos(hi_deg * M_PI / 180.0));
  }
  const double alpha = excent / std::sqrt(std::fabs(1.0 - excent * excent));
  const double alpha2 = alpha * alpha;
  if (excent > 1.0) {
    auto dum = [&](double x) {
      const double alpx = std::sqrt(alpha2 + x * x);
      return x * alpx + alpha2 * std::log(x + alpx);
    };
    return std::fabs(dum(x1) - dum(x2));
  }
  auto dum = [&](double x) {
    const double almx = std::sqrt(alpha2 - x * x);
    return x * almx + alpha2 * std::asin(x / alpha);
  };
  return std::fabs(dum(x1) - dum(x2));
}

}  // namespace

std::vector<std::pair<double, double>> lidf_weights(double ala_deg, int n_classes) {
  if (!(ala_deg > 0.0 && ala_deg < 90.0)) {
    throw DomainError("lidf_weights: mean leaf angle must lie in (0, 90)");
  }
  if (n_classes < 9) throw DomainError("lidf_weights: need at least 9 classes");

  const double excent = excentricity(ala_deg);
  std::vector<std::pair<double, double>> out;
  double total = 0.0;
  if (n_classes == kLidfClasses) {
    for (int i = 0; i < kLidfClasses; ++i) {
      const double f = ellipsoid_bin(excent, kLidfLowerDeg[i], kLidfUpperDeg[i]);
      out.emplace_back(kLidfMidDeg[i], f);
      total += f;
    }
  } else {
    const double width = 90.0 / n_classes;
    for (int i = 0; i < n_classes; ++i) {
      const double lo = i * width;
      const double hi = lo + width;
      const double f = ellipsoid_bin(excent, lo, hi);
      out.emplace_back(0.5 * (lo + hi), f);
      total += f;
    }
  }
  for (auto& [angle, weight] : out) weight /= total;
  return out;
}

diff::Value campbell_lidf_taped(diff::Tape& tape, const diff::Value& ala) {
  using diff::Value;
  const Value excent =
      diff::exp(((-1.6184e-5 * ala + 2.1145e-3) * ala - 1.2390e-1) * ala + 3.2491);
  const double ev = excent.scalar();

  std::array<Value, kLidfClasses> freqs;
  if (std::fabs(ev - 1.0) < 1e-9) {
    // spherical limit: class masses are constants
    for (int i = 0; i < kLidfClasses; ++i) {
      freqs[i] = tape.constant(
          std::fabs(std::cos(kLidfLowerDeg[i] * M_PI / 180.0) -
                    std::cos(kLidfUpperDeg[i] * M_PI / 180.0)));
    }
  } else {
    const bool oblate = ev > 1.0;
    const Value e2 = square(excent);
    const Value alpha = oblate ? excent / diff::sqrt(e2 - 1.0)
                               : excent / diff::sqrt(1.0 - e2);
    const Value alpha2 = square(alpha);
    auto xedge = [&](double deg) -> Value {
      if (deg >= 90.0) return tape.constant(0.0);
      const double tanv = std::tan(deg * M_PI / 180.0);
      return excent / diff::sqrt(1.0 + (tanv * tanv) * e2);
    };
    auto dum = [&](const Value& x) -> Value {
      if (oblate) {
        const Value alpx = diff::sqrt(alpha2 + square(x));
        return x * alpx + alpha2 * diff::log(x + alpx);
      }
      const Value almx = diff::sqrt(alpha2 - square(x));
      return x * almx + alpha2 * diff::asin(x / alpha);
    };
    for (int i = 0; i < kLidfClasses; ++i) {
      const Value x1 = xedge(kLidfLowerDeg[i]);
      const Value x2 = xedge(kLidfUpperDeg[i]);
      freqs[i] = diff::abs(dum(x1) - dum(x2));
    }
  }

  const Value stacked = tape.concat(std::span<const Value>(freqs));
  return stacked / diff::sum(stacked);
}

}  // namespace ptv::sail

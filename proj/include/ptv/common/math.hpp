#pragma once

#include <cstddef>
#include <span>

namespace ptv::math {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kEulerGamma = 0.57721566490153286061;

double norm_pdf(double x);
double norm_cdf(double x);

// Inverse standard normal CDF (Wichura's rational approximations, full
// double precision). Throws DomainError unless p is strictly inside (0, 1).
double norm_quantile(double p);

// Exponential integral E1(x) = ∫_x^∞ e^-t / t dt for x > 0.
// Power series below 1, modified-Lentz continued fraction above; relative
// accuracy ~1e-14 over the domain the plate model uses.
double expint_e1(double x);

// Compensated (Kahan) summation.
double kahan_sum(std::span<const double> values);

}  // namespace ptv::math

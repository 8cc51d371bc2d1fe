#pragma once

#include "ptv/diff/tape.hpp"
#include "ptv/params.hpp"

namespace ptv::tvae {

// One latent marginal: a normal restricted to [lower, upper].
struct TruncatedNormalSpec {
  double mu = 0.0;
  double sigma = 1.0;
  double lower = 0.0;
  double upper = 1.0;
};

struct TnMoments {
  double mean = 0.0;
  double variance = 0.0;
};

double tn_pdf(const TruncatedNormalSpec& tn, double x);
double tn_cdf(const TruncatedNormalSpec& tn, double x);
TnMoments tn_moments(const TruncatedNormalSpec& tn);
double tn_quantile(const TruncatedNormalSpec& tn, double p);
double tn_entropy(const TruncatedNormalSpec& tn);

// Inverse-CDF transform of a uniform draw; the degenerate branch (vanishing
// in-interval mass) returns the nearer bound.
double tn_sample(const TruncatedNormalSpec& tn, double u);

// KL[q || U(lower, upper)] = -H(q) + log(upper - lower); requires the TN
// support to sit inside the uniform support.
double kl_tn_uniform(const TruncatedNormalSpec& tn, double lower, double upper);

// differentiable counterparts used by the training loss (fixed bounds)
diff::Value tn_sample_taped(diff::Tape& tape, const diff::Value& mu,
                            const diff::Value& sigma, double lower,
                            double upper, double u);
diff::Value kl_tn_uniform_taped(diff::Tape& tape, const diff::Value& mu,
                                const diff::Value& sigma, double lower,
                                double upper);

// affine map between the normalized [0, 1] latent box and physical units
double scale_to_physical(double z_norm, const VariableInfo& info);
double scale_to_normalized(double z_phys, const VariableInfo& info);

// physical-space posterior: one TN per retrievable variable, canonical order
struct LatentPosterior {
  std::array<TruncatedNormalSpec, kNumLatentVariables> vars;
};

void validate_spec(const TruncatedNormalSpec& tn);

}  // namespace ptv::tvae

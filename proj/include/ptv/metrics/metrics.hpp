#pragma once

#include <span>
#include <vector>

#include "ptv/common/rng.hpp"
#include "ptv/tvae/truncated_normal.hpp"

namespace ptv::metrics {

double rmse(std::span<const double> pred, std::span<const double> truth);

// 1 - SS_res / SS_tot; requires length >= 2 and non-degenerate truth
double r2(std::span<const double> pred, std::span<const double> truth);

struct IntervalEstimate {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

double mpiw(std::span<const IntervalEstimate> intervals);

// fraction of truths inside their closed interval [lower, upper]
double picp(std::span<const IntervalEstimate> intervals,
            std::span<const double> truth);

// Monte Carlo canopy chlorophyll content from the joint (independent)
// LAI x Cab posterior: sample products, report the mean and the empirical
// central 95% interval.
IntervalEstimate ccc_posterior(const tvae::LatentPosterior& posterior,
                               int n_samples, Rng& rng);

}  // namespace ptv::metrics

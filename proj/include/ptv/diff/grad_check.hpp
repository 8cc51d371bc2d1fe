#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ptv/diff/tape.hpp"

namespace ptv::diff {

// Builds a scalar output from leaf inputs registered on the given tape.
// The callable must register exactly x.size() scalar inputs, in order.
using ScalarFn =
    std::function<Value(Tape&, std::span<const double> x)>;

struct GradCheckEntry {
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
  bool pass = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_err = 0.0;
  bool pass = true;
  std::string summary() const;
};

// Central finite differences against the tape gradient. `step` is scaled per
// coordinate by max(1, |x_i|); the error metric is
// |g - g_fd| / max(|g|, |g_fd|, floor). An empty `indices` checks every
// coordinate.
GradCheckReport grad_check(const ScalarFn& f, std::span<const double> x,
                           double step, double tol,
                           std::span<const std::size_t> indices = {},
                           double floor = 1e-6);

}  // namespace ptv::diff

#include "ptv/common/rng.hpp"

#include "ptv/common/math.hpp"

namespace ptv {

double Rng::normal() { return math::norm_quantile(uniform01()); }

}  // namespace ptv

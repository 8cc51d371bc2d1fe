#pragma once

#include <vector>

#include "ptv/diff/tape.hpp"
#include "ptv/params.hpp"
#include "ptv/spectral/types.hpp"

namespace ptv::prospect {

// Average transmissivity of a dielectric interface for an incidence cone of
// half-angle alpha (Stern's closed form, Allen's correction). alpha in
// (0, 90] degrees, n > 1.
double tav(double alpha_deg, double n);

struct LeafOptics {
  spectral::SpectrumCurve reflectance;
  spectral::SpectrumCurve transmittance;
};

// Wavelength-constant inputs of the plate model, pre-derived from the
// coefficient tables so repeated evaluations share them read-only.
struct PlateConstants {
  int count = 0;
  std::vector<double> k_cab, k_car, k_brown, k_cw, k_cm;
  std::vector<double> talf, ralf, t12, r12, t21, r21;

  static PlateConstants build(const spectral::LeafCoefficientTables& tables);
  PlateConstants gather(const std::vector<int>& indices) const;
};

struct LeafInputsTaped {
  diff::Value n_struct, cab, car, cbrown, cw, cm;
};

struct LeafOpticsTaped {
  diff::Value reflectance;
  diff::Value transmittance;
};

// Generalized plate model with N layers: the first interface is tuned for a
// 40 degree incidence cone, inner interfaces for diffuse (90 degree) flux.
// Differentiable in all six leaf parameters.
LeafOpticsTaped prospect5_taped(diff::Tape& tape, const LeafInputsTaped& leaf,
                                const PlateConstants& pc);

LeafOptics prospect5(const LeafParams& params,
                     const spectral::LeafCoefficientTables& tables);

// throws DomainError outside the hard physical domain (N >= 1, contents >= 0)
void validate_leaf_params(const LeafParams& params);

}  // namespace ptv::prospect

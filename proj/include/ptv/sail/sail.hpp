#pragma once

#include <array>
#include <utility>
#include <vector>

#include "ptv/diff/tape.hpp"
#include "ptv/params.hpp"
#include "ptv/prospect/prospect.hpp"
#include "ptv/spectral/types.hpp"

namespace ptv::sail {

inline constexpr int kLidfClasses = 13;

// class mid angles / edges of the standard 13-class discretization
extern const std::array<double, kLidfClasses> kLidfMidDeg;
extern const std::array<double, kLidfClasses> kLidfLowerDeg;
extern const std::array<double, kLidfClasses> kLidfUpperDeg;

// Ellipsoidal leaf-inclination weights parameterized by mean leaf angle.
// n_classes == 13 uses the standard class layout; other counts (>= 9) use
// uniform classes. Returns (class mid angle, weight), weights sum to 1.
std::vector<std::pair<double, double>> lidf_weights(double ala_deg, int n_classes);

// taped variant on the standard 13 classes (vector Value of length 13)
diff::Value campbell_lidf_taped(diff::Tape& tape, const diff::Value& ala_deg);

// Per-geometry scattering factors, constant w.r.t. every retrievable input.
struct GeometryFactors {
  double cts = 0.0, cto = 0.0, ctscto = 0.0, dso = 0.0;
  std::array<double, kLidfClasses> ksli{}, koli{}, sobli{}, sofli{}, bfli{};

  static GeometryFactors compute(const ViewGeometry& geom);
};

// two-parameter soil model: bright * (wet*wet_basis + (1-wet)*dry_basis),
// clipped to [0, 1]
spectral::SpectrumCurve soil_spectrum(double soil_wet, double soil_bright,
                                      const spectral::SoilBasis& basis);

diff::Value soil_spectrum_taped(diff::Tape& tape, const diff::Value& soil_wet,
                                const diff::Value& soil_bright,
                                const std::vector<double>& dry,
                                const std::vector<double>& wet);

struct CanopyInputsTaped {
  diff::Value lai, ala_deg, hotspot;
};

// Four-stream bidirectional reflectance factor over the active wavelength
// set. LAI == 0 returns the soil spectrum node unchanged (exact identity).
diff::Value sail4_taped(diff::Tape& tape, const prospect::LeafOpticsTaped& leaf,
                        const CanopyInputsTaped& canopy,
                        const GeometryFactors& geom, const diff::Value& soil);

spectral::SpectrumCurve sail4(const prospect::LeafOptics& leaf,
                              const CanopyParams& canopy,
                              const ViewGeometry& geom,
                              const spectral::SpectrumCurve& soil);

void validate_canopy_params(const CanopyParams& canopy);
void validate_geometry(const ViewGeometry& geom);

}  // namespace ptv::sail

#pragma once

#include "ptv/spectral/types.hpp"

namespace ptv::spectral {

// Band value b = Σ_λ w_b(λ)·ρ(λ) / Σ_λ w_b(λ), summed over each band's
// support in ascending wavelength order. Linear in the spectrum.
BandReflectance convolve_to_bands(const SpectrumCurve& spectrum,
                                  const SensorResponse& srf);

}  // namespace ptv::spectral

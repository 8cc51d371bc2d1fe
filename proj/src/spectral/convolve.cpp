#include "ptv/spectral/convolve.hpp"

#include "ptv/common/error.hpp"

namespace ptv::spectral {

BandReflectance convolve_to_bands(const SpectrumCurve& spectrum,
                                  const SensorResponse& srf) {
  if (!(spectrum.grid == srf.grid)) {
    throw DomainError("convolve_to_bands: spectrum and response grids differ");
  }
  BandReflectance out;
  for (int b = 0; b < kNumBands; ++b) {
    const SensorResponse::Band& band = srf.bands[b];
    const double* w = band.weights.values.data() + band.support_offset;
    const double* rho = spectrum.values.data() + band.support_offset;
    double num = 0.0;
    for (int i = 0; i < band.support_length; ++i) num += w[i] * rho[i];
    out[b] = num / band.weight_sum;
  }
  return out;
}

}  // namespace ptv::spectral

#pragma once

#include <array>
#include <string>
#include <vector>

namespace ptv::spectral {

inline constexpr int kNumBands = 10;

struct SpectralGrid {
  double start_nm = 400.0;
  double step_nm = 1.0;
  int count = 0;

  double wavelength(int i) const { return start_nm + step_nm * i; }
  double end_nm() const { return wavelength(count - 1); }
  bool operator==(const SpectralGrid&) const = default;
  void validate() const;  // step > 0, count >= 2
};

struct SpectrumCurve {
  SpectralGrid grid;
  std::vector<double> values;

  double operator[](int i) const { return values[i]; }
};

struct LeafCoefficientTables {
  SpectralGrid grid;
  SpectrumCurve refractive_index;
  SpectrumCurve k_cab;
  SpectrumCurve k_car;
  SpectrumCurve k_brown;
  SpectrumCurve k_cw;
  SpectrumCurve k_cm;
};

struct SoilBasis {
  SpectrumCurve dry;
  SpectrumCurve wet;
};

struct SensorResponse {
  struct Band {
    std::string id;
    SpectrumCurve weights;  // model grid, zero outside the band support
    int support_offset = 0;
    int support_length = 0;
    double weight_sum = 0.0;  // Σ weights over the support, > 0
  };
  SpectralGrid grid;
  std::vector<Band> bands;
};

struct BandReflectance {
  std::array<double, kNumBands> values{};

  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
};

}  // namespace ptv::spectral

#pragma once

#include <string>
#include <vector>

#include "ptv/prospect/prospect.hpp"
#include "ptv/spectral/loaders.hpp"

namespace ptv::sail {

// Immutable constant tables the differentiable forward pipeline reads.
// `build_full` keeps every model-grid wavelength; `build_compact` gathers
// only wavelengths inside some band's support, which leaves every band
// value bit-identical while dropping the dead weight between bands.
struct DecoderTables {
  spectral::SpectralGrid full_grid;
  int count = 0;
  bool compact = false;
  std::vector<int> index_map;  // active position -> full-grid index
  prospect::PlateConstants plate;
  std::vector<double> soil_dry;
  std::vector<double> soil_wet;

  struct BandWindow {
    std::string id;
    int offset = 0;  // into the active wavelength set
    std::vector<double> weights;
    double weight_sum = 0.0;
  };
  std::vector<BandWindow> bands;

  static DecoderTables build_full(const spectral::RetrievalAssets& assets);
  static DecoderTables build_compact(const spectral::RetrievalAssets& assets);
};

}  // namespace ptv::sail

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ptv/spectral/types.hpp"

namespace ptv::spectral {

// Linear resampling from an arbitrary ascending wavelength axis; an exact
// grid match degenerates to a copy.
std::vector<double> resample_linear(const std::vector<double>& wavelengths,
                                    const std::vector<double>& values,
                                    const SpectralGrid& target);

// Leaf coefficient table: columns wavelength, n, k_cab, k_car, k_brown,
// k_cw, k_cm. Determines the model grid as the 1 nm grid covered by both the
// file and the 400-2500 nm modelling window.
LeafCoefficientTables load_coefficient_tables(const std::filesystem::path& path);

SoilBasis load_soil(const std::filesystem::path& path, const SpectralGrid& grid);

// Wide-format response table: wavelength column plus one weight column per
// band; band ids come from the last `columns:` header comment.
SensorResponse load_srf(const std::filesystem::path& path, const SpectralGrid& grid);

struct ChecksumEntry {
  std::string name;
  std::string expected;
  std::string actual;
  bool ok = false;
};

// Verifies `manifest.sha256` in the asset directory against file contents.
std::vector<ChecksumEntry> verify_checksums(const std::filesystem::path& asset_dir);

// The full immutable asset bundle used by the forward model. Everything is
// loaded once and shared read-only afterwards.
struct RetrievalAssets {
  SpectralGrid grid;
  LeafCoefficientTables tables;
  SoilBasis soil;
  SensorResponse srf;
  std::map<std::string, std::string> checksums;  // file name -> sha256

  static RetrievalAssets load(const std::filesystem::path& asset_dir,
                              bool verify = true);
};

}  // namespace ptv::spectral

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ptv/params.hpp"
#include "ptv/sim/sampler.hpp"
#include "ptv/spectral/types.hpp"

namespace ptv::sim {

// Row layout: 14 parameters, 10 clean bands, 10 noisy bands (float32).
inline constexpr int kDatasetCols = kNumVariables + 2 * spectral::kNumBands;

std::vector<std::string> dataset_column_names();

struct Dataset {
  std::size_t n = 0;
  std::vector<float> data;  // n * kDatasetCols, row-major

  ParameterVector params(std::size_t row) const;
  spectral::BandReflectance clean_bands(std::size_t row) const;
  spectral::BandReflectance noisy_bands(std::size_t row) const;
  const float* row(std::size_t r) const { return data.data() + r * kDatasetCols; }
};

struct DatasetManifest {
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string config_text;
  std::map<std::string, std::string> asset_checksums;
  std::string code_version;
};

// single text header line followed by little-endian float32 rows
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& path);

// side-car `<path>.manifest.json`
void write_manifest(const std::filesystem::path& dataset_path,
                    const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& dataset_path);

void export_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);

// Deterministic for fixed (cfg, seed, assets): sample i's stream depends only
// on (seed, i), so any thread count reproduces the serial result exactly.
Dataset generate_dataset(std::size_t n, const SamplerConfig& cfg,
                         std::uint64_t seed, const sail::DecoderTables& tables,
                         int threads = 1);

DatasetManifest make_manifest(std::size_t n, std::uint64_t seed,
                              const SamplerConfig& cfg,
                              const std::map<std::string, std::string>& checksums);

}  // namespace ptv::sim

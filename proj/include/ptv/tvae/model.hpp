#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "ptv/tvae/encoder.hpp"
#include "ptv/tvae/truncated_normal.hpp"

namespace ptv::tvae {

// Input normalization constants frozen at training time: bands are
// standardized by training-set statistics, angles scaled to [0, 1] by their
// sampling ranges.
struct Normalization {
  std::array<double, spectral::kNumBands> band_mean{};
  std::array<double, spectral::kNumBands> band_sd{};
  std::array<double, 3> angle_lower{15.0, 0.0, 0.0};
  std::array<double, 3> angle_upper{60.0, 10.0, 180.0};

  std::array<double, kNumTokens> tokens_for(const spectral::BandReflectance& bands,
                                            const ViewGeometry& geom) const;
};

struct TrainManifest {
  std::uint64_t seed = 0;
  std::string dataset_hash;
  std::string config_hash;
  std::string schedule;
  std::map<std::string, std::string> asset_checksums;
  int epochs_completed = 0;
  int best_epoch = -1;
  double best_val_loss = 0.0;
  std::string code_version;
};

struct TrainedModel {
  EncoderConfig config;
  ParamStore params;
  Normalization norm;
  TrainManifest manifest;

  bool has_optimizer_state = false;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  long adam_t = 0;

  std::size_t weight_count() const { return params.size(); }

  // versioned binary checkpoint plus a human-readable .summary.txt side-car
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);
};

}  // namespace ptv::tvae

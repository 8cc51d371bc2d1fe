#pragma once

#include <iosfwd>
#include <optional>

#include "ptv/diff/optimizer.hpp"
#include "ptv/sim/dataset.hpp"
#include "ptv/tvae/loss.hpp"

namespace ptv::tvae {

struct TrainConfig {
  EncoderConfig encoder;
  diff::AdamConfig adam;
  int batch_size = 64;
  int epochs = 30;
  double beta_start = 1e-4;
  double beta_end = 1.0;
  double beta_warmup_fraction = 0.5;  // linear ramp over this share of epochs
  double sigma_theta_init = 0.005;
  double sigma_theta_floor = 1e-4;
  std::uint64_t seed = 1;
  int threads = 4;
  bool compact_decoder = true;

  static TrainConfig from_config(const Config& cfg);
  void validate() const;
  double beta_at(int epoch) const;
  std::string schedule_text() const;
};

struct EpochStats {
  int epoch = 0;
  double beta = 0.0;
  double train_total = 0.0, train_rec = 0.0, train_kl = 0.0;
  double val_total = 0.0, val_rec = 0.0, val_kl = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  TrainedModel model;  // best-validation snapshot
  std::vector<EpochStats> log;
  bool aborted_non_finite = false;
};

// Mini-batch training of the encoder (and the per-band noise constants)
// against the frozen differentiable forward model. Fully seeded; reruns with
// the same config, datasets and thread count reproduce checkpoints bit for
// bit. Per-sample gradients are accumulated into per-worker buffers over
// statically partitioned batch chunks and reduced in worker order.
TrainResult train(const sim::Dataset& train_set, const sim::Dataset& val_set,
                  const TrainConfig& cfg, const spectral::RetrievalAssets& assets,
                  std::ostream* progress = nullptr,
                  const TrainedModel* resume = nullptr);

void write_epoch_log_csv(const std::filesystem::path& path,
                         const std::vector<EpochStats>& log);

}  // namespace ptv::tvae

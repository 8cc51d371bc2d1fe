#pragma once

#include <string>
#include <vector>

#include "ptv/common/config.hpp"
#include "ptv/diff/tape.hpp"
#include "ptv/params.hpp"
#include "ptv/spectral/types.hpp"

namespace ptv::tvae {

// 10 band tokens + 3 angle tokens
inline constexpr int kNumTokens = spectral::kNumBands + 3;

struct EncoderConfig {
  int d_model = 32;
  int n_heads = 4;
  int n_layers = 2;
  int d_ff = 64;
  int n_latent = kNumLatentVariables;
  double sigma_floor = 1e-4;
  double layer_norm_eps = 1e-5;

  void validate() const;
  static EncoderConfig from_config(const Config& cfg,
                                   const std::string& prefix = "encoder.");
};

struct TensorSpec {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

// Flat weight storage with a fixed registration order, so checkpoints,
// gradients and optimizer state all share one coordinate layout.
class ParamStore {
 public:
  ParamStore() = default;
  explicit ParamStore(const EncoderConfig& cfg) { configure(cfg); }

  void configure(const EncoderConfig& cfg);
  std::size_t size() const { return flat_.size(); }
  std::span<double> flat() { return flat_; }
  std::span<const double> flat() const { return flat_; }
  const std::vector<TensorSpec>& tensors() const { return tensors_; }
  std::span<double> tensor(const std::string& name);
  std::span<const double> tensor(const std::string& name) const;

  // seeded scaled-uniform weights, unit layer-norm gains, zero biases,
  // per-band observation noise initialized at sigma_theta_init
  void init_weights(std::uint64_t seed, double sigma_theta_init);

 private:
  std::vector<TensorSpec> tensors_;
  std::vector<double> flat_;
};

struct EncoderLeaves {
  std::vector<diff::Value> tensors;  // one leaf per TensorSpec, same order
};

// registers every tensor as a tape input node
EncoderLeaves register_leaves(diff::Tape& tape, const ParamStore& params);

struct PosteriorNodes {
  std::array<diff::Value, kNumLatentVariables> mu;     // logistic, in (0, 1)
  std::array<diff::Value, kNumLatentVariables> sigma;  // softplus + floor
};

// Token lift + sinusoidal positions + self-attention stack + mean pooling +
// per-latent (mu, sigma) heads, all on the tape.
PosteriorNodes encode_tokens_taped(diff::Tape& tape, const EncoderConfig& cfg,
                                   const EncoderLeaves& leaves,
                                   std::span<const double> tokens);

// sinusoidal positional encoding, kNumTokens x d_model
std::vector<double> positional_encoding(int d_model);

}  // namespace ptv::tvae

#pragma once

#include "ptv/sail/forward.hpp"
#include "ptv/tvae/model.hpp"

namespace ptv::tvae {

struct DecoderNoiseModel {
  std::array<double, spectral::kNumBands> log_sd{};

  std::array<double, spectral::kNumBands> sd() const;
};

// Gaussian negative log-likelihood of the observed bands under the decoded
// mean and the per-band noise model:
//   1/2 Σ_l [ log(2π σ_l²) + (x_l - μ_l)² / σ_l² ]
double reconstruction_nll(const spectral::BandReflectance& x,
                          const spectral::BandReflectance& decoded_mean,
                          const DecoderNoiseModel& noise);

struct LossNodes {
  diff::Value total;
  diff::Value rec;
  diff::Value kl;
  std::array<diff::Value, kNumLatentVariables> z_physical;
};

// Encoder posterior -> one reparameterized latent draw -> physical scaling ->
// differentiable forward model -> Gaussian NLL, plus the KL of each latent
// marginal against its uniform prior box.
LossNodes loss_taped(diff::Tape& tape, const EncoderConfig& cfg,
                     const EncoderLeaves& leaves, const Normalization& norm,
                     const spectral::BandReflectance& noisy_bands,
                     const ViewGeometry& geom,
                     const sail::GeometryFactors& geom_factors,
                     const sail::DecoderTables& tables, double beta_kl,
                     std::span<const double> u_draws);

struct LossBreakdown {
  double total = 0.0;
  double rec = 0.0;
  double kl = 0.0;
};

// plain evaluation on a frozen model (used by tests and diagnostics)
LossBreakdown evaluate_loss(const TrainedModel& model,
                            const sail::DecoderTables& tables,
                            const spectral::BandReflectance& noisy_bands,
                            const ViewGeometry& geom, double beta_kl,
                            std::span<const double> u_draws);

}  // namespace ptv::tvae

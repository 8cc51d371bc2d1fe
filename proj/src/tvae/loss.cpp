#include "ptv/tvae/loss.hpp"

#include <cmath>

#include "ptv/common/error.hpp"
#include "ptv/common/math.hpp"

namespace ptv::tvae {

std::array<double, spectral::kNumBands> DecoderNoiseModel::sd() const {
  std::array<double, spectral::kNumBands> out{};
  for (int b = 0; b < spectral::kNumBands; ++b) out[b] = std::exp(log_sd[b]);
  return out;
}

double reconstruction_nll(const spectral::BandReflectance& x,
                          const spectral::BandReflectance& decoded_mean,
                          const DecoderNoiseModel& noise) {
  double total = 0.0;
  for (int b = 0; b < spectral::kNumBands; ++b) {
    const double sd = std::exp(noise.log_sd[b]);
    const double resid = x[b] - decoded_mean[b];
    total += std::log(2.0 * math::kPi * sd * sd) + (resid * resid) / (sd * sd);
  }
  return 0.5 * total;
}

LossNodes loss_taped(diff::Tape& tape, const EncoderConfig& cfg,
                     const EncoderLeaves& leaves, const Normalization& norm,
                     const spectral::BandReflectance& noisy_bands,
                     const ViewGeometry& geom,
                     const sail::GeometryFactors& geom_factors,
                     const sail::DecoderTables& tables, double beta_kl,
                     std::span<const double> u_draws) {
  using diff::Value;
  if (static_cast<int>(u_draws.size()) != cfg.n_latent) {
    throw DomainError("loss: need one uniform draw per latent variable");
  }
  if (!(beta_kl >= 0.0)) throw DomainError("loss: beta_kl must be non-negative");

  const auto tokens = norm.tokens_for(noisy_bands, geom);
  const PosteriorNodes posterior =
      encode_tokens_taped(tape, cfg, leaves, std::span<const double>(tokens));

  // one reparameterized draw per latent, then the affine map to units
  LossNodes nodes;
  Value kl_total;
  for (int i = 0; i < cfg.n_latent; ++i) {
    const Value z_norm = tn_sample_taped(tape, posterior.mu[i], posterior.sigma[i],
                                         0.0, 1.0, u_draws[i]);
    const VariableInfo& info = kVariableTable[i];
    nodes.z_physical[i] = info.lower + z_norm * (info.upper - info.lower);
    const Value kl_i =
        kl_tn_uniform_taped(tape, posterior.mu[i], posterior.sigma[i], 0.0, 1.0);
    kl_total = i == 0 ? kl_i : kl_total + kl_i;
  }

  const sail::ForwardInputsTaped decoder_in{
      nodes.z_physical[kN],       nodes.z_physical[kCab],
      nodes.z_physical[kCar],     nodes.z_physical[kCbrown],
      nodes.z_physical[kCw],      nodes.z_physical[kCm],
      nodes.z_physical[kLai],     nodes.z_physical[kAla],
      nodes.z_physical[kHotspot], nodes.z_physical[kSoilWet],
      nodes.z_physical[kSoilBright]};
  const Value decoded =
      sail::prosail_bands_taped(tape, decoder_in, geom_factors, tables);

  // Gaussian reconstruction NLL with the learnable per-band noise
  const Value log_sigma = leaves.tensors.back();
  const Value sigma2 = diff::exp(2.0 * log_sigma);
  const Value x = tape.constant(std::span<const double>(noisy_bands.values));
  const Value resid = x - decoded;
  const Value terms = diff::log(sigma2 * (2.0 * math::kPi)) +
                      square(resid) / sigma2;
  nodes.rec = 0.5 * diff::sum(terms);
  nodes.kl = kl_total;
  nodes.total = nodes.rec + beta_kl * nodes.kl;
  return nodes;
}

LossBreakdown evaluate_loss(const TrainedModel& model,
                            const sail::DecoderTables& tables,
                            const spectral::BandReflectance& noisy_bands,
                            const ViewGeometry& geom, double beta_kl,
                            std::span<const double> u_draws) {
  static thread_local diff::Tape tape;
  tape.reset();
  const EncoderLeaves leaves = register_leaves(tape, model.params);
  const auto geom_factors = sail::GeometryFactors::compute(geom);
  const LossNodes nodes =
      loss_taped(tape, model.config, leaves, model.norm, noisy_bands, geom,
                 geom_factors, tables, beta_kl, u_draws);
  return {nodes.total.scalar(), nodes.rec.scalar(), nodes.kl.scalar()};
}

}  // namespace ptv::tvae

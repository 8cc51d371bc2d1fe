#include "ptv/tvae/infer.hpp"

#include <cmath>

namespace ptv::tvae {

LatentPosterior encode(const spectral::BandReflectance& bands,
                       const ViewGeometry& geom, const TrainedModel& model) {
  static thread_local diff::Tape tape;
  tape.reset();
  const EncoderLeaves leaves = register_leaves(tape, model.params);
  const auto tokens = model.norm.tokens_for(bands, geom);
  const PosteriorNodes nodes = encode_tokens_taped(
      tape, model.config, leaves, std::span<const double>(tokens));

  LatentPosterior posterior;
  for (int i = 0; i < kNumLatentVariables; ++i) {
    const VariableInfo& info = kVariableTable[i];
    const double range = info.upper - info.lower;
    posterior.vars[i].mu = info.lower + nodes.mu[i].scalar() * range;
    posterior.vars[i].sigma = nodes.sigma[i].scalar() * range;
    posterior.vars[i].lower = info.lower;
    posterior.vars[i].upper = info.upper;
  }
  return posterior;
}

ParameterEstimates infer(const TrainedModel& model,
                         const spectral::BandReflectance& bands,
                         const ViewGeometry& geom) {
  const LatentPosterior posterior = encode(bands, geom, model);
  ParameterEstimates out;
  for (int i = 0; i < kNumLatentVariables; ++i) {
    const TruncatedNormalSpec& tn = posterior.vars[i];
    const TnMoments m = tn_moments(tn);
    out[i].name = kVariableTable[i].name;
    out[i].mean = m.mean;
    out[i].sd = std::sqrt(std::max(m.variance, 0.0));
    out[i].lower95 = tn_quantile(tn, 0.025);
    out[i].upper95 = tn_quantile(tn, 0.975);
  }
  return out;
}

}  // namespace ptv::tvae

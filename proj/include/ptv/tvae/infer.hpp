#pragma once

#include "ptv/tvae/model.hpp"

namespace ptv::tvae {

// Runs the encoder alone and reports the physical-space posterior, one
// truncated normal per retrievable variable (canonical order).
LatentPosterior encode(const spectral::BandReflectance& bands,
                       const ViewGeometry& geom, const TrainedModel& model);

struct ParameterEstimate {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double lower95 = 0.0;  // 2.5% quantile
  double upper95 = 0.0;  // 97.5% quantile
};

using ParameterEstimates = std::array<ParameterEstimate, kNumLatentVariables>;

// posterior mean / sd / central 95% interval per variable, physical units
ParameterEstimates infer(const TrainedModel& model,
                         const spectral::BandReflectance& bands,
                         const ViewGeometry& geom);

}  // namespace ptv::tvae

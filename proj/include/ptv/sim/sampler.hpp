#pragma once

#include <string>
#include <vector>

#include "ptv/common/config.hpp"
#include "ptv/common/rng.hpp"
#include "ptv/params.hpp"
#include "ptv/sail/decoder_tables.hpp"
#include "ptv/spectral/types.hpp"

namespace ptv::sim {

struct VariableSpec {
  std::string name;
  Family family = Family::kTruncatedNormal;
  double lower = 0.0;
  double upper = 1.0;
  double mean = 0.5;  // TN only
  double sd = 0.25;   // TN only

  // Table defaults: mean at the interval midpoint, sd a quarter of the range
  static VariableSpec defaults_for(int variable);
};

struct CoDistributionRule {
  enum class Cmp { kGe, kGt, kLe, kLt };
  std::string name;
  int trigger_variable = kLai;  // rules key off the canopy-density driver
  Cmp cmp = Cmp::kGe;
  double threshold = 7.0;

  struct Override {
    int variable;
    double lower;
    double upper;
  };
  std::vector<Override> overrides;

  bool fires(double value) const;
};

struct SamplerConfig {
  std::array<VariableSpec, kNumVariables> variables;
  std::vector<CoDistributionRule> rules;
  double noise_level = 0.005;   // absolute reflectance units
  bool noise_relative = false;  // multiply by the band value instead

  // Table-1 marginals plus the dense-canopy co-distribution rule
  // (LAI >= 7 narrows Cab to 45-90, N to 1.3-1.8, SoilBright to 0.5-1.2)
  static SamplerConfig defaults();

  // reads var.<Name>, rule.<name>.*, noise.* keys on top of defaults
  static SamplerConfig from_config(const Config& cfg);

  void validate() const;
  std::string canonical_text() const;
};

// inverse-CDF draw; one uniform consumed
double sample_truncated_normal(const VariableSpec& spec, Rng& rng);

// LAI first, then the remaining variables in canonical order with any fired
// rule overrides applied; consumes exactly kNumVariables uniforms
ParameterVector sample_parameters(const SamplerConfig& cfg, Rng& rng);

// independent Gaussian perturbation per band, clipped to [0, 1];
// consumes exactly kNumBands uniforms
spectral::BandReflectance add_noise(const spectral::BandReflectance& bands,
                                    Rng& rng, double level,
                                    bool relative = false);

struct SimulatedSample {
  ParameterVector params;
  spectral::BandReflectance clean_bands;
  spectral::BandReflectance noisy_bands;
};

// fully determined by (cfg, tables, seed, index)
SimulatedSample simulate_sample(const SamplerConfig& cfg,
                                const sail::DecoderTables& tables,
                                std::uint64_t seed, std::uint64_t index);

}  // namespace ptv::sim

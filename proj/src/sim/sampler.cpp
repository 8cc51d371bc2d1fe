#include "ptv/sim/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ptv/common/error.hpp"
#include "ptv/sail/forward.hpp"
#include "ptv/tvae/truncated_normal.hpp"

namespace ptv::sim {

VariableSpec VariableSpec::defaults_for(int variable) {
  const VariableInfo& info = kVariableTable[variable];
  VariableSpec spec;
  spec.name = info.name;
  spec.family = info.family;
  spec.lower = info.lower;
  spec.upper = info.upper;
  spec.mean = 0.5 * (info.lower + info.upper);
  spec.sd = (info.upper - info.lower) / 4.0;
  return spec;
}

bool CoDistributionRule::fires(double value) const {
  switch (cmp) {
    case Cmp::kGe: return value >= threshold;
    case Cmp::kGt: return value > threshold;
    case Cmp::kLe: return value <= threshold;
    case Cmp::kLt: return value < threshold;
  }
  return false;
}

SamplerConfig SamplerConfig::defaults() {
  SamplerConfig cfg;
  for (int i = 0; i < kNumVariables; ++i) {
    cfg.variables[i] = VariableSpec::defaults_for(i);
  }
  CoDistributionRule dense;
  dense.name = "dense_canopy";
  dense.trigger_variable = kLai;
  dense.cmp = CoDistributionRule::Cmp::kGe;
  dense.threshold = 7.0;
  dense.overrides = {{kCab, 45.0, 90.0}, {kN, 1.3, 1.8}, {kSoilBright, 0.5, 1.2}};
  cfg.rules.push_back(std::move(dense));
  return cfg;
}

namespace {

VariableSpec parse_variable_spec(const std::string& name, const std::string& text) {
  const int index = variable_index(name);
  if (index < 0) throw ConfigError("sampler config: unknown variable '" + name + "'");
  std::string fields = text;
  std::replace(fields.begin(), fields.end(), ',', ' ');
  std::istringstream in(fields);
  std::string family;
  if (!(in >> family)) {
    throw ConfigError("sampler config: empty spec for variable '" + name + "'");
  }
  VariableSpec spec = VariableSpec::defaults_for(index);
  if (family == "uniform") {
    spec.family = Family::kUniform;
  } else if (family == "tn") {
    spec.family = Family::kTruncatedNormal;
  } else {
    throw ConfigError("sampler config: variable '" + name +
                      "': family must be 'tn' or 'uniform', got '" + family + "'");
  }
  double lo, hi;
  if (in >> lo >> hi) {
    spec.lower = lo;
    spec.upper = hi;
    spec.mean = 0.5 * (lo + hi);
    spec.sd = (hi - lo) / 4.0;
  }
  double mean, sd;
  if (in >> mean >> sd) {
    spec.mean = mean;
    spec.sd = sd;
  }
  return spec;
}

CoDistributionRule::Cmp parse_cmp(const std::string& op, const std::string& where) {
  if (op == ">=") return CoDistributionRule::Cmp::kGe;
  if (op == ">") return CoDistributionRule::Cmp::kGt;
  if (op == "<=") return CoDistributionRule::Cmp::kLe;
  if (op == "<") return CoDistributionRule::Cmp::kLt;
  throw ConfigError(where + ": comparator must be one of >=, >, <=, <");
}

}  // namespace

SamplerConfig SamplerConfig::from_config(const Config& cfg) {
  SamplerConfig out = defaults();
  if (cfg.get_bool("sampler.default_rules", true) == false) out.rules.clear();

  std::vector<std::string> rule_names;
  for (const std::string& key : cfg.keys()) {
    if (key.rfind("var.", 0) == 0) {
      const std::string name = key.substr(4);
      const int index = variable_index(name);
      if (index < 0) throw ConfigError("sampler config: unknown variable '" + name + "'");
      out.variables[index] = parse_variable_spec(name, *cfg.raw(key));
    } else if (key.rfind("rule.", 0) == 0) {
      const auto rest = key.substr(5);
      const auto dotpos = rest.find('.');
      if (dotpos == std::string::npos) {
        throw ConfigError("sampler config: malformed rule key '" + key + "'");
      }
      const std::string rule = rest.substr(0, dotpos);
      if (std::find(rule_names.begin(), rule_names.end(), rule) == rule_names.end()) {
        rule_names.push_back(rule);
      }
    }
  }

  for (const std::string& rule_name : rule_names) {
    CoDistributionRule rule;
    rule.name = rule_name;
    const std::string prefix = "rule." + rule_name + ".";
    const auto trigger = cfg.raw(prefix + "trigger");
    if (!trigger) throw ConfigError("sampler config: rule '" + rule_name + "' has no trigger");
    std::istringstream in(*trigger);
    std::string var, op;
    double threshold;
    if (!(in >> var >> op >> threshold)) {
      throw ConfigError("sampler config: rule '" + rule_name +
                        "': trigger must read 'VAR OP VALUE'");
    }
    const int trig_index = variable_index(var);
    if (trig_index < 0) {
      throw ConfigError("sampler config: rule '" + rule_name +
                        "': unknown trigger variable '" + var + "'");
    }
    if (trig_index != kLai) {
      throw ConfigError("sampler config: rule '" + rule_name +
                        "': triggers must key off LAI (the driving variable)");
    }
    rule.trigger_variable = trig_index;
    rule.cmp = parse_cmp(op, "rule '" + rule_name + "'");
    rule.threshold = threshold;

    for (const std::string& key : cfg.keys()) {
      const std::string ov_prefix = prefix + "override.";
      if (key.rfind(ov_prefix, 0) != 0) continue;
      const std::string var_name = key.substr(ov_prefix.size());
      const int index = variable_index(var_name);
      if (index < 0) {
        throw ConfigError("sampler config: rule '" + rule_name +
                          "': unknown override variable '" + var_name + "'");
      }
      std::string bounds = *cfg.raw(key);
      std::replace(bounds.begin(), bounds.end(), ',', ' ');
      std::istringstream bin(bounds);
      double lo, hi;
      if (!(bin >> lo >> hi)) {
        throw ConfigError("sampler config: override '" + key +
                          "' must read 'lower, upper'");
      }
      rule.overrides.push_back({index, lo, hi});
    }
    if (rule.overrides.empty()) {
      throw ConfigError("sampler config: rule '" + rule_name + "' overrides nothing");
    }
    out.rules.push_back(std::move(rule));
  }

  out.noise_level = cfg.get_double("noise.level", out.noise_level);
  out.noise_relative = cfg.get_bool("noise.relative", out.noise_relative);
  out.validate();
  return out;
}

void SamplerConfig::validate() const {
  for (int i = 0; i < kNumVariables; ++i) {
    const VariableSpec& spec = variables[i];
    if (!(spec.lower < spec.upper)) {
      throw ConfigError("sampler config: variable '" + spec.name +
                        "': lower must be < upper");
    }
    if (spec.family == Family::kTruncatedNormal && !(spec.sd > 0.0)) {
      throw ConfigError("sampler config: variable '" + spec.name +
                        "': TN sd must be positive");
    }
  }
  if (!(noise_level >= 0.0)) {
    throw ConfigError("sampler config: noise level must be non-negative");
  }
  for (const CoDistributionRule& rule : rules) {
    for (const auto& ov : rule.overrides) {
      const VariableSpec& base = variables[ov.variable];
      if (ov.variable == rule.trigger_variable) {
        throw ConfigError("sampler config: rule '" + rule.name +
                          "' may not override its own trigger variable");
      }
      if (!(ov.lower < ov.upper) || ov.lower < base.lower - 1e-12 ||
          ov.upper > base.upper + 1e-12) {
        throw ConfigError("sampler config: rule '" + rule.name + "': override for '" +
                          base.name + "' must nest inside the base interval");
      }
    }
  }
}

std::string SamplerConfig::canonical_text() const {
  std::ostringstream out;
  out.precision(17);
  for (const VariableSpec& spec : variables) {
    out << "var." << spec.name << " = "
        << (spec.family == Family::kUniform ? "uniform" : "tn") << ", "
        << spec.lower << ", " << spec.upper;
    if (spec.family == Family::kTruncatedNormal) {
      out << ", " << spec.mean << ", " << spec.sd;
    }
    out << "\n";
  }
  for (const CoDistributionRule& rule : rules) {
    const char* ops[] = {">=", ">", "<=", "<"};
    out << "rule." << rule.name << ".trigger = "
        << kVariableTable[rule.trigger_variable].name << " "
        << ops[static_cast<int>(rule.cmp)] << " " << rule.threshold << "\n";
    for (const auto& ov : rule.overrides) {
      out << "rule." << rule.name << ".override." << kVariableTable[ov.variable].name
          << " = " << ov.lower << ", " << ov.upper << "\n";
    }
  }
  out << "noise.level = " << noise_level << "\n";
  out << "noise.relative = " << (noise_relative ? "true" : "false") << "\n";
  return out.str();
}

double sample_truncated_normal(const VariableSpec& spec, Rng& rng) {
  if (spec.family != Family::kTruncatedNormal) {
    throw DomainError("sample_truncated_normal: spec is not truncated-normal");
  }
  const tvae::TruncatedNormalSpec tn{spec.mean, spec.sd, spec.lower, spec.upper};
  return tvae::tn_sample(tn, rng.uniform01());
}

namespace {

double draw_variable(const VariableSpec& spec, Rng& rng) {
  if (spec.family == Family::kUniform) return rng.uniform(spec.lower, spec.upper);
  return sample_truncated_normal(spec, rng);
}

}  // namespace

ParameterVector sample_parameters(const SamplerConfig& cfg, Rng& rng) {
  ParameterVector pv;

  // LAI drives the co-distributions, so it is drawn first
  pv[kLai] = draw_variable(cfg.variables[kLai], rng);

  std::array<VariableSpec, kNumVariables> active = cfg.variables;
  for (const CoDistributionRule& rule : cfg.rules) {
    if (!rule.fires(pv[rule.trigger_variable])) continue;
    for (const auto& ov : rule.overrides) {
      active[ov.variable].lower = ov.lower;
      active[ov.variable].upper = ov.upper;
    }
  }

  for (int i = 0; i < kNumVariables; ++i) {
    if (i == kLai) continue;
    pv[i] = draw_variable(active[i], rng);
  }
  return pv;
}

spectral::BandReflectance add_noise(const spectral::BandReflectance& bands,
                                    Rng& rng, double level, bool relative) {
  if (!(level >= 0.0)) throw DomainError("add_noise: level must be non-negative");
  spectral::BandReflectance out = bands;
  for (int b = 0; b < spectral::kNumBands; ++b) {
    const double draw = rng.normal();
    if (level > 0.0) {
      const double sd = relative ? level * bands[b] : level;
      out[b] = std::clamp(bands[b] + sd * draw, 0.0, 1.0);
    }
  }
  return out;
}

SimulatedSample simulate_sample(const SamplerConfig& cfg,
                                const sail::DecoderTables& tables,
                                std::uint64_t seed, std::uint64_t index) {
  Rng rng = Rng::derive(seed, index);
  SimulatedSample sample;
  sample.params = sample_parameters(cfg, rng);
  sample.clean_bands = sail::prosail_forward(sample.params, tables);
  sample.noisy_bands =
      add_noise(sample.clean_bands, rng, cfg.noise_level, cfg.noise_relative);
  return sample;
}

}  // namespace ptv::sim

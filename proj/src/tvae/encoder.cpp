#include "ptv/tvae/encoder.hpp"

#include <cmath>

#include "ptv/common/error.hpp"
#include "ptv/common/rng.hpp"

namespace ptv::tvae {

void EncoderConfig::validate() const {
  if (d_model <= 0 || n_heads <= 0 || n_layers <= 0 || d_ff <= 0) {
    throw ConfigError("encoder config: dimensions must be positive");
  }
  if (d_model % n_heads != 0) {
    throw ConfigError("encoder config: d_model must be divisible by n_heads");
  }
  if (n_latent != kNumLatentVariables) {
    throw ConfigError("encoder config: latent count must equal the number of "
                      "retrievable variables (" +
                      std::to_string(kNumLatentVariables) + ")");
  }
  if (!(sigma_floor > 0.0)) {
    throw ConfigError("encoder config: sigma floor must be positive");
  }
}

EncoderConfig EncoderConfig::from_config(const Config& cfg, const std::string& prefix) {
  EncoderConfig out;
  out.d_model = static_cast<int>(cfg.get_long(prefix + "d_model", out.d_model));
  out.n_heads = static_cast<int>(cfg.get_long(prefix + "n_heads", out.n_heads));
  out.n_layers = static_cast<int>(cfg.get_long(prefix + "n_layers", out.n_layers));
  out.d_ff = static_cast<int>(cfg.get_long(prefix + "d_ff", out.d_ff));
  out.sigma_floor = cfg.get_double(prefix + "sigma_floor", out.sigma_floor);
  out.validate();
  return out;
}

void ParamStore::configure(const EncoderConfig& cfg) {
  cfg.validate();
  tensors_.clear();
  std::size_t offset = 0;
  auto add = [&](const std::string& name, int rows, int cols) {
    tensors_.push_back(TensorSpec{name, rows, cols, offset});
    offset += static_cast<std::size_t>(rows) * cols;
  };
  const int d = cfg.d_model;
  const int dh = cfg.d_model / cfg.n_heads;
  add("lift_w", kNumTokens, d);
  add("lift_b", kNumTokens, d);
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string L = "layer" + std::to_string(l) + ".";
    for (int h = 0; h < cfg.n_heads; ++h) {
      const std::string H = L + "head" + std::to_string(h) + ".";
      add(H + "wq", d, dh);
      add(H + "wk", d, dh);
      add(H + "wv", d, dh);
      add(H + "wo", dh, d);
    }
    add(L + "ln1_gamma", 1, d);
    add(L + "ln1_beta", 1, d);
    add(L + "ff_w1", d, cfg.d_ff);
    add(L + "ff_b1", 1, cfg.d_ff);
    add(L + "ff_w2", cfg.d_ff, d);
    add(L + "ff_b2", 1, d);
    add(L + "ln2_gamma", 1, d);
    add(L + "ln2_beta", 1, d);
  }
  add("head_w", d, 2 * cfg.n_latent);
  add("head_b", 1, 2 * cfg.n_latent);
  add("log_sigma_theta", 1, spectral::kNumBands);
  flat_.assign(offset, 0.0);
}

std::span<double> ParamStore::tensor(const std::string& name) {
  for (const TensorSpec& t : tensors_) {
    if (t.name == name) return {flat_.data() + t.offset, t.size()};
  }
  throw DomainError("ParamStore: unknown tensor '" + name + "'");
}

std::span<const double> ParamStore::tensor(const std::string& name) const {
  for (const TensorSpec& t : tensors_) {
    if (t.name == name) return {flat_.data() + t.offset, t.size()};
  }
  throw DomainError("ParamStore: unknown tensor '" + name + "'");
}

void ParamStore::init_weights(std::uint64_t seed, double sigma_theta_init) {
  Rng rng(seed);
  for (const TensorSpec& t : tensors_) {
    double* dst = flat_.data() + t.offset;
    const bool is_gain = t.name.find("gamma") != std::string::npos;
    const bool is_bias = t.name.find("_b") != std::string::npos ||
                         t.name.find("beta") != std::string::npos;
    if (t.name == "log_sigma_theta") {
      const double v = std::log(sigma_theta_init);
      for (std::size_t i = 0; i < t.size(); ++i) dst[i] = v;
    } else if (is_gain) {
      for (std::size_t i = 0; i < t.size(); ++i) dst[i] = 1.0;
    } else if (is_bias) {
      for (std::size_t i = 0; i < t.size(); ++i) dst[i] = 0.0;
    } else {
      // scaled uniform; the lift rows have fan-in 1
      const int fan_in = t.name == "lift_w" ? 1 : t.rows;
      const int fan_out = t.cols;
      const double s = std::sqrt(6.0 / (fan_in + fan_out));
      for (std::size_t i = 0; i < t.size(); ++i) dst[i] = rng.uniform(-s, s);
    }
  }
}

EncoderLeaves register_leaves(diff::Tape& tape, const ParamStore& params) {
  EncoderLeaves leaves;
  leaves.tensors.reserve(params.tensors().size());
  const std::span<const double> flat = params.flat();
  for (const TensorSpec& t : params.tensors()) {
    leaves.tensors.push_back(tape.input(flat.subspan(t.offset, t.size())));
  }
  return leaves;
}

std::vector<double> positional_encoding(int d_model) {
  std::vector<double> pe(static_cast<std::size_t>(kNumTokens) * d_model, 0.0);
  for (int t = 0; t < kNumTokens; ++t) {
    for (int k = 0; 2 * k < d_model; ++k) {
      const double omega = std::pow(10000.0, -2.0 * k / d_model);
      pe[t * d_model + 2 * k] = std::sin(t * omega);
      if (2 * k + 1 < d_model) pe[t * d_model + 2 * k + 1] = std::cos(t * omega);
    }
  }
  return pe;
}

PosteriorNodes encode_tokens_taped(diff::Tape& tape, const EncoderConfig& cfg,
                                   const EncoderLeaves& leaves,
                                   std::span<const double> tokens) {
  using diff::Value;
  if (static_cast<int>(tokens.size()) != kNumTokens) {
    throw DomainError("encode: expected " + std::to_string(kNumTokens) + " tokens");
  }
  for (double v : tokens) {
    if (!std::isfinite(v)) throw DomainError("encode: non-finite input token");
  }

  const int d = cfg.d_model;
  const int dh = cfg.d_model / cfg.n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  std::size_t next = 0;
  auto leaf = [&]() { return leaves.tensors[next++]; };

  // per-token affine lift of each scalar, plus fixed sinusoidal positions
  std::vector<double> xrep(static_cast<std::size_t>(kNumTokens) * d);
  for (int t = 0; t < kNumTokens; ++t) {
    for (int j = 0; j < d; ++j) xrep[t * d + j] = tokens[t];
  }
  const std::vector<double> pe = positional_encoding(d);
  const Value lift_w = leaf();
  const Value lift_b = leaf();
  Value x = lift_w * tape.constant(std::span<const double>(xrep)) + lift_b +
            tape.constant(std::span<const double>(pe));

  for (int l = 0; l < cfg.n_layers; ++l) {
    Value attn_out;
    for (int h = 0; h < cfg.n_heads; ++h) {
      const Value wq = leaf();
      const Value wk = leaf();
      const Value wv = leaf();
      const Value wo = leaf();
      const Value q = tape.matmul(x, wq, kNumTokens, d, dh);
      const Value k = tape.matmul(x, wk, kNumTokens, d, dh);
      const Value v = tape.matmul(x, wv, kNumTokens, d, dh);
      const Value scores = tape.matmul_nt(q, k, kNumTokens, dh, kNumTokens) * scale;
      const Value attn = tape.softmax_rows(scores, kNumTokens, kNumTokens);
      const Value ctx = tape.matmul(attn, v, kNumTokens, kNumTokens, dh);
      const Value head_out = tape.matmul(ctx, wo, kNumTokens, dh, d);
      attn_out = h == 0 ? head_out : attn_out + head_out;
    }
    const Value ln1_gamma = leaf();
    const Value ln1_beta = leaf();
    x = tape.layer_norm(x + attn_out, ln1_gamma, ln1_beta, kNumTokens, d,
                        cfg.layer_norm_eps);

    const Value ff_w1 = leaf();
    const Value ff_b1 = leaf();
    const Value ff_w2 = leaf();
    const Value ff_b2 = leaf();
    const Value hidden = diff::tanh(
        tape.row_bcast_add(tape.matmul(x, ff_w1, kNumTokens, d, cfg.d_ff),
                           ff_b1, kNumTokens, cfg.d_ff));
    const Value ff_out = tape.row_bcast_add(
        tape.matmul(hidden, ff_w2, kNumTokens, cfg.d_ff, d), ff_b2, kNumTokens, d);
    const Value ln2_gamma = leaf();
    const Value ln2_beta = leaf();
    x = tape.layer_norm(x + ff_out, ln2_gamma, ln2_beta, kNumTokens, d,
                        cfg.layer_norm_eps);
  }

  const Value pooled = tape.col_mean(x, kNumTokens, d);
  const Value head_w = leaf();
  const Value head_b = leaf();
  const Value raw =
      tape.row_bcast_add(tape.matmul(pooled, head_w, 1, d, 2 * cfg.n_latent),
                         head_b, 1, 2 * cfg.n_latent);

  PosteriorNodes out;
  for (int i = 0; i < cfg.n_latent; ++i) {
    const Value mu_raw = tape.slice(raw, 2 * i, 1);
    const Value sigma_raw = tape.slice(raw, 2 * i + 1, 1);
    out.mu[i] = diff::logistic(mu_raw);
    out.sigma[i] = diff::softplus(sigma_raw) + cfg.sigma_floor;
  }
  return out;
}

}  // namespace ptv::tvae

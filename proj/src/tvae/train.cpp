#include "ptv/tvae/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "ptv/common/error.hpp"
#include "ptv/common/hash.hpp"

namespace ptv::tvae {

TrainConfig TrainConfig::from_config(const Config& cfg) {
  TrainConfig out;
  out.encoder = EncoderConfig::from_config(cfg);
  out.adam.learning_rate = cfg.get_double("train.learning_rate", out.adam.learning_rate);
  out.adam.beta1 = cfg.get_double("train.adam_beta1", out.adam.beta1);
  out.adam.beta2 = cfg.get_double("train.adam_beta2", out.adam.beta2);
  out.adam.clip_norm = cfg.get_double("train.clip_norm", out.adam.clip_norm);
  out.batch_size = static_cast<int>(cfg.get_long("train.batch_size", out.batch_size));
  out.epochs = static_cast<int>(cfg.get_long("train.epochs", out.epochs));
  out.beta_start = cfg.get_double("train.beta_start", out.beta_start);
  out.beta_end = cfg.get_double("train.beta_end", out.beta_end);
  out.beta_warmup_fraction =
      cfg.get_double("train.beta_warmup_fraction", out.beta_warmup_fraction);
  out.sigma_theta_init = cfg.get_double("train.sigma_theta_init", out.sigma_theta_init);
  out.threads = static_cast<int>(cfg.get_long("train.threads", out.threads));
  out.compact_decoder = cfg.get_bool("train.compact_decoder", out.compact_decoder);
  out.validate();
  return out;
}

void TrainConfig::validate() const {
  encoder.validate();
  if (batch_size <= 0 || epochs <= 0) {
    throw ConfigError("train config: batch size and epochs must be positive");
  }
  if (!(beta_start >= 0.0 && beta_end >= 0.0)) {
    throw ConfigError("train config: beta endpoints must be non-negative");
  }
  if (!(beta_warmup_fraction >= 0.0 && beta_warmup_fraction <= 1.0)) {
    throw ConfigError("train config: beta warmup fraction must lie in [0, 1]");
  }
  if (threads <= 0) throw ConfigError("train config: threads must be positive");
}

double TrainConfig::beta_at(int epoch) const {
  const int warmup = static_cast<int>(std::lround(epochs * beta_warmup_fraction));
  if (warmup <= 1 || epoch >= warmup) return beta_end;
  const double t = static_cast<double>(epoch) / (warmup - 1);
  return beta_start + (beta_end - beta_start) * std::min(1.0, t);
}

std::string TrainConfig::schedule_text() const {
  std::ostringstream out;
  out << "beta " << beta_start << " -> " << beta_end << " linear over "
      << static_cast<int>(std::lround(epochs * beta_warmup_fraction))
      << " of " << epochs << " epochs";
  return out.str();
}

namespace {

struct SampleEval {
  double total = 0.0, rec = 0.0, kl = 0.0;
  bool finite = true;
};

// per-worker scratch: one tape plus one gradient accumulator
struct Worker {
  diff::Tape tape;
  std::vector<double> grad;
  double total = 0.0, rec = 0.0, kl = 0.0;
  bool finite = true;

  void reset(std::size_t n) {
    grad.assign(n, 0.0);
    total = rec = kl = 0.0;
    finite = true;
  }
};

std::array<double, kNumLatentVariables> latent_draws(std::uint64_t seed,
                                                     std::uint64_t stream,
                                                     std::uint64_t index) {
  Rng rng = Rng::derive(Rng::derive(seed, stream).next_u64(), index);
  std::array<double, kNumLatentVariables> u{};
  for (double& v : u) v = rng.uniform01();
  return u;
}

}  // namespace

TrainResult train(const sim::Dataset& train_set, const sim::Dataset& val_set,
                  const TrainConfig& cfg, const spectral::RetrievalAssets& assets,
                  std::ostream* progress, const TrainedModel* resume) {
  cfg.validate();
  if (train_set.n == 0 || val_set.n == 0) {
    throw DataError("train: empty dataset");
  }

  const sail::DecoderTables tables = cfg.compact_decoder
                                         ? sail::DecoderTables::build_compact(assets)
                                         : sail::DecoderTables::build_full(assets);

  TrainedModel model;
  int start_epoch = 0;
  if (resume != nullptr) {
    model = *resume;
    start_epoch = model.manifest.epochs_completed;
  } else {
    model.config = cfg.encoder;
    model.params.configure(cfg.encoder);
    model.params.init_weights(cfg.seed, cfg.sigma_theta_init);
    // normalization constants from the training inputs
    std::array<double, spectral::kNumBands> mean{}, sq{};
    for (std::size_t i = 0; i < train_set.n; ++i) {
      const auto bands = train_set.noisy_bands(i);
      for (int b = 0; b < spectral::kNumBands; ++b) {
        mean[b] += bands[b];
        sq[b] += bands[b] * bands[b];
      }
    }
    for (int b = 0; b < spectral::kNumBands; ++b) {
      mean[b] /= static_cast<double>(train_set.n);
      const double var = sq[b] / static_cast<double>(train_set.n) - mean[b] * mean[b];
      model.norm.band_mean[b] = mean[b];
      model.norm.band_sd[b] = std::sqrt(std::max(var, 1e-12));
    }
    for (int a = 0; a < 3; ++a) {
      model.norm.angle_lower[a] = kVariableTable[kSunZenith + a].lower;
      model.norm.angle_upper[a] = kVariableTable[kSunZenith + a].upper;
    }
  }
  model.manifest.seed = cfg.seed;
  model.manifest.schedule = cfg.schedule_text();
  model.manifest.code_version = "prosail-tvae 1.0.0";

  const std::size_t n_params = model.params.size();
  diff::Adam adam(n_params, cfg.adam);
  if (resume != nullptr && resume->has_optimizer_state) {
    adam.restore(resume->adam_m, resume->adam_v, resume->adam_t);
  }

  const int n_workers = std::max(1, cfg.threads);
  std::vector<Worker> workers(n_workers);

  const double log_sigma_floor = std::log(cfg.sigma_theta_floor);
  auto project_noise = [&]() {
    auto log_sigma = model.params.tensor("log_sigma_theta");
    for (double& v : log_sigma) v = std::max(v, log_sigma_floor);
  };
  project_noise();

  // evaluates sample `idx` of `set`, accumulating loss stats and (optionally)
  // gradients into the worker
  auto eval_sample = [&](Worker& w, const sim::Dataset& set, std::size_t idx,
                         double beta, const std::array<double, 11>& u,
                         bool with_grad) {
    const ParameterVector pv = set.params(idx);
    const ViewGeometry geom = pv.geometry();
    const auto geom_factors = sail::GeometryFactors::compute(geom);
    const spectral::BandReflectance noisy = set.noisy_bands(idx);
    w.tape.reset();
    const EncoderLeaves leaves = register_leaves(w.tape, model.params);
    const LossNodes nodes =
        loss_taped(w.tape, model.config, leaves, model.norm, noisy, geom,
                   geom_factors, tables, beta, std::span<const double>(u));
    const double total = nodes.total.scalar();
    if (!std::isfinite(total)) {
      w.finite = false;
      return;
    }
    w.total += total;
    w.rec += nodes.rec.scalar();
    w.kl += nodes.kl.scalar();
    if (with_grad) {
      w.tape.backward(nodes.total);
      std::size_t pos = 0;
      for (const diff::Value& leaf : leaves.tensors) {
        const auto adj = w.tape.adjoint(leaf);
        for (double g : adj) w.grad[pos++] += g;
      }
    }
  };

  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  TrainedModel best = model;
  bool have_best = false;

  std::vector<std::size_t> order(train_set.n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    const auto tic = std::chrono::steady_clock::now();
    const double beta = cfg.beta_at(epoch);

    // deterministic shuffle
    {
      Rng shuffle_rng = Rng::derive(cfg.seed, 0x5u * 1000003u + epoch);
      for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = shuffle_rng.next_u64() % i;
        std::swap(order[i - 1], order[j]);
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.beta = beta;
    bool finite = true;

    std::size_t done = 0;
    std::vector<double> grad(n_params);
    while (done < train_set.n && finite) {
      const std::size_t batch = std::min<std::size_t>(cfg.batch_size, train_set.n - done);
      const std::size_t chunk = (batch + n_workers - 1) / n_workers;
      auto run_worker = [&](int w_idx) {
        Worker& w = workers[w_idx];
        w.reset(n_params);
        const std::size_t begin = done + std::min(batch, w_idx * chunk);
        const std::size_t end = done + std::min(batch, (w_idx + 1) * chunk);
        for (std::size_t k = begin; k < end && w.finite; ++k) {
          const std::size_t idx = order[k];
          const auto u = latent_draws(cfg.seed, 0xE10C'0000u + epoch, idx);
          eval_sample(w, train_set, idx, beta, u, true);
        }
      };
      if (n_workers == 1) {
        run_worker(0);
      } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(run_worker, w);
        for (auto& t : pool) t.join();
      }

      std::fill(grad.begin(), grad.end(), 0.0);
      for (const Worker& w : workers) {
        if (!w.finite) finite = false;
        stats.train_total += w.total;
        stats.train_rec += w.rec;
        stats.train_kl += w.kl;
        for (std::size_t i = 0; i < n_params; ++i) grad[i] += w.grad[i];
      }
      if (!finite) break;
      const double inv = 1.0 / static_cast<double>(batch);
      for (double& g : grad) g *= inv;
      adam.step(model.params.flat(), grad);
      project_noise();
      done += batch;
    }

    if (!finite) {
      result.aborted_non_finite = true;
      if (progress != nullptr) {
        *progress << "epoch " << epoch << ": non-finite loss, aborting\n";
      }
      break;
    }
    stats.train_total /= static_cast<double>(train_set.n);
    stats.train_rec /= static_cast<double>(train_set.n);
    stats.train_kl /= static_cast<double>(train_set.n);

    // validation sweep (fixed draws per sample, no gradients)
    {
      const std::size_t chunk = (val_set.n + n_workers - 1) / n_workers;
      auto run_val = [&](int w_idx) {
        Worker& w = workers[w_idx];
        w.reset(0);
        const std::size_t begin = std::min(val_set.n, w_idx * chunk);
        const std::size_t end = std::min(val_set.n, begin + chunk);
        for (std::size_t idx = begin; idx < end && w.finite; ++idx) {
          const auto u = latent_draws(cfg.seed, 0x7A11Du, idx);
          eval_sample(w, val_set, idx, beta, u, false);
        }
      };
      if (n_workers == 1) {
        run_val(0);
      } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(run_val, w);
        for (auto& t : pool) t.join();
      }
      for (const Worker& w : workers) {
        if (!w.finite) finite = false;
        stats.val_total += w.total;
        stats.val_rec += w.rec;
        stats.val_kl += w.kl;
      }
      stats.val_total /= static_cast<double>(val_set.n);
      stats.val_rec /= static_cast<double>(val_set.n);
      stats.val_kl /= static_cast<double>(val_set.n);
    }
    if (!finite) {
      result.aborted_non_finite = true;
      break;
    }

    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
    result.log.push_back(stats);
    if (progress != nullptr) {
      *progress << "epoch " << epoch << " beta " << beta << " train " << stats.train_total
                << " (rec " << stats.train_rec << ", kl " << stats.train_kl << ") val "
                << stats.val_total << " (rec " << stats.val_rec << ", kl "
                << stats.val_kl << ")\n";
    }

    model.manifest.epochs_completed = epoch + 1;
    if (stats.val_total < best_val) {
      best_val = stats.val_total;
      best = model;
      best.manifest.best_epoch = epoch;
      best.manifest.best_val_loss = best_val;
      best.has_optimizer_state = true;
      best.adam_m.assign(adam.first_moment().begin(), adam.first_moment().end());
      best.adam_v.assign(adam.second_moment().begin(), adam.second_moment().end());
      best.adam_t = adam.step_count();
      have_best = true;
    }
  }

  result.model = have_best ? best : model;
  return result;
}

void write_epoch_log_csv(const std::filesystem::path& path,
                         const std::vector<EpochStats>& log) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write training log: " + path.string());
  out << "epoch,beta,train_loss,train_rec,train_kl,val_loss,val_rec,val_kl,"
         "wall_seconds\n";
  out.precision(10);
  for (const EpochStats& s : log) {
    out << s.epoch << ',' << s.beta << ',' << s.train_total << ',' << s.train_rec
        << ',' << s.train_kl << ',' << s.val_total << ',' << s.val_rec << ','
        << s.val_kl << ',' << s.wall_seconds << "\n";
  }
}

}  // namespace ptv::tvae

#include "ptv/tvae/model.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ptv/common/error.hpp"
#include "ptv/common/table_io.hpp"

namespace ptv::tvae {

namespace {
constexpr char kMagic[8] = {'P', 'T', 'V', 'C', 'K', 'P', 'T', '1'};
}

std::array<double, kNumTokens> Normalization::tokens_for(
    const spectral::BandReflectance& bands, const ViewGeometry& geom) const {
  std::array<double, kNumTokens> tokens{};
  for (int b = 0; b < spectral::kNumBands; ++b) {
    const double sd = std::max(band_sd[b], 1e-6);
    tokens[b] = (bands[b] - band_mean[b]) / sd;
  }
  const double angles[3] = {geom.sun_zenith_deg, geom.view_zenith_deg,
                            geom.rel_azimuth_deg};
  for (int a = 0; a < 3; ++a) {
    tokens[spectral::kNumBands + a] =
        (angles[a] - angle_lower[a]) / (angle_upper[a] - angle_lower[a]);
  }
  return tokens;
}

void TrainedModel::save(const std::filesystem::path& path) const {
  nlohmann::json header;
  header["format_version"] = 1;
  header["encoder"] = {{"d_model", config.d_model},
                       {"n_heads", config.n_heads},
                       {"n_layers", config.n_layers},
                       {"d_ff", config.d_ff},
                       {"n_latent", config.n_latent},
                       {"sigma_floor", config.sigma_floor},
                       {"layer_norm_eps", config.layer_norm_eps}};
  header["weight_count"] = params.size();
  header["normalization"] = {{"band_mean", norm.band_mean},
                             {"band_sd", norm.band_sd},
                             {"angle_lower", norm.angle_lower},
                             {"angle_upper", norm.angle_upper}};
  header["manifest"] = {{"seed", manifest.seed},
                        {"dataset_hash", manifest.dataset_hash},
                        {"config_hash", manifest.config_hash},
                        {"schedule", manifest.schedule},
                        {"asset_checksums", manifest.asset_checksums},
                        {"epochs_completed", manifest.epochs_completed},
                        {"best_epoch", manifest.best_epoch},
                        {"best_val_loss", manifest.best_val_loss},
                        {"code_version", manifest.code_version}};
  header["optimizer_state"] = has_optimizer_state;
  header["adam_t"] = adam_t;
  const std::string header_bytes = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t len = header_bytes.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(header_bytes.data(), static_cast<std::streamsize>(len));
  const auto flat = params.flat();
  out.write(reinterpret_cast<const char*>(flat.data()),
            static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (has_optimizer_state) {
    out.write(reinterpret_cast<const char*>(adam_m.data()),
              static_cast<std::streamsize>(adam_m.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(adam_v.data()),
              static_cast<std::streamsize>(adam_v.size() * sizeof(double)));
  }
  if (!out) throw DataError("checkpoint write failed: " + path.string());

  std::ostringstream summary;
  summary << "model checkpoint\n"
          << "  weights: " << params.size() << "\n"
          << "  encoder: d_model=" << config.d_model << " heads=" << config.n_heads
          << " layers=" << config.n_layers << " d_ff=" << config.d_ff << "\n"
          << "  epochs completed: " << manifest.epochs_completed << "\n"
          << "  best epoch: " << manifest.best_epoch
          << " (val loss " << manifest.best_val_loss << ")\n"
          << "  beta schedule: " << manifest.schedule << "\n"
          << "  dataset: " << manifest.dataset_hash << "\n"
          << "  seed: " << manifest.seed << "\n";
  write_text_file(path.string() + ".summary.txt", summary.str());
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError(path.string() + ": not a checkpoint file");
  }
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string header_bytes(len, '\0');
  in.read(header_bytes.data(), static_cast<std::streamsize>(len));
  const auto header = nlohmann::json::parse(header_bytes);

  TrainedModel model;
  const auto& enc = header.at("encoder");
  model.config.d_model = enc.at("d_model").get<int>();
  model.config.n_heads = enc.at("n_heads").get<int>();
  model.config.n_layers = enc.at("n_layers").get<int>();
  model.config.d_ff = enc.at("d_ff").get<int>();
  model.config.n_latent = enc.at("n_latent").get<int>();
  model.config.sigma_floor = enc.at("sigma_floor").get<double>();
  model.config.layer_norm_eps = enc.at("layer_norm_eps").get<double>();
  model.params.configure(model.config);

  const std::uint64_t count = header.at("weight_count").get<std::uint64_t>();
  if (count != model.params.size()) {
    throw DataError(path.string() + ": weight count mismatch");
  }
  const auto& nm = header.at("normalization");
  for (int b = 0; b < spectral::kNumBands; ++b) {
    model.norm.band_mean[b] = nm.at("band_mean")[b].get<double>();
    model.norm.band_sd[b] = nm.at("band_sd")[b].get<double>();
  }
  for (int a = 0; a < 3; ++a) {
    model.norm.angle_lower[a] = nm.at("angle_lower")[a].get<double>();
    model.norm.angle_upper[a] = nm.at("angle_upper")[a].get<double>();
  }
  const auto& mf = header.at("manifest");
  model.manifest.seed = mf.at("seed").get<std::uint64_t>();
  model.manifest.dataset_hash = mf.at("dataset_hash").get<std::string>();
  model.manifest.config_hash = mf.at("config_hash").get<std::string>();
  model.manifest.schedule = mf.at("schedule").get<std::string>();
  model.manifest.epochs_completed = mf.at("epochs_completed").get<int>();
  model.manifest.best_epoch = mf.at("best_epoch").get<int>();
  model.manifest.best_val_loss = mf.at("best_val_loss").get<double>();
  model.manifest.code_version = mf.value("code_version", std::string{});
  if (mf.contains("asset_checksums")) {
    for (const auto& [k, v] : mf.at("asset_checksums").items()) {
      model.manifest.asset_checksums[k] = v.get<std::string>();
    }
  }

  auto flat = model.params.flat();
  in.read(reinterpret_cast<char*>(flat.data()),
          static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != flat.size() * sizeof(double)) {
    throw DataError(path.string() + ": truncated weights");
  }
  model.has_optimizer_state = header.value("optimizer_state", false);
  model.adam_t = header.value("adam_t", 0L);
  if (model.has_optimizer_state) {
    model.adam_m.resize(flat.size());
    model.adam_v.resize(flat.size());
    in.read(reinterpret_cast<char*>(model.adam_m.data()),
            static_cast<std::streamsize>(flat.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(model.adam_v.data()),
            static_cast<std::streamsize>(flat.size() * sizeof(double)));
    if (!in) throw DataError(path.string() + ": truncated optimizer state");
  }
  return model;
}

}  // namespace ptv::tvae

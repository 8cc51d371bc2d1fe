#include "ptv/sim/dataset.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ptv/common/error.hpp"
#include "ptv/common/hash.hpp"
#include "ptv/common/table_io.hpp"

namespace ptv::sim {

namespace {
constexpr const char* kCodeVersion = "prosail-tvae 1.0.0";
constexpr const char* kHeaderTag = "prosail-tvae-dataset v1";
}  // namespace

std::vector<std::string> dataset_column_names() {
  std::vector<std::string> names;
  for (int i = 0; i < kNumVariables; ++i) names.push_back(kVariableTable[i].name);
  static const char* bands[spectral::kNumBands] = {
      "B2", "B3", "B4", "B5", "B6", "B7", "B8", "B8A", "B11", "B12"};
  for (const char* b : bands) names.push_back(std::string("clean_") + b);
  for (const char* b : bands) names.push_back(std::string("noisy_") + b);
  return names;
}

ParameterVector Dataset::params(std::size_t r) const {
  ParameterVector pv;
  const float* p = row(r);
  for (int i = 0; i < kNumVariables; ++i) pv[i] = p[i];
  return pv;
}

spectral::BandReflectance Dataset::clean_bands(std::size_t r) const {
  spectral::BandReflectance out;
  const float* p = row(r) + kNumVariables;
  for (int b = 0; b < spectral::kNumBands; ++b) out[b] = p[b];
  return out;
}

spectral::BandReflectance Dataset::noisy_bands(std::size_t r) const {
  spectral::BandReflectance out;
  const float* p = row(r) + kNumVariables + spectral::kNumBands;
  for (int b = 0; b < spectral::kNumBands; ++b) out[b] = p[b];
  return out;
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset: " + path.string());
  std::ostringstream header;
  header << "# " << kHeaderTag << " n=" << dataset.n << " cols=" << kDatasetCols
         << " columns=";
  const auto names = dataset_column_names();
  for (std::size_t i = 0; i < names.size(); ++i) header << (i ? "," : "") << names[i];
  header << "\n";
  out << header.str();
  out.write(reinterpret_cast<const char*>(dataset.data.data()),
            static_cast<std::streamsize>(dataset.data.size() * sizeof(float)));
  if (!out) throw DataError("dataset write failed: " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset: " + path.string());
  std::string header;
  if (!std::getline(in, header) || header.find(kHeaderTag) == std::string::npos) {
    throw DataError(path.string() + ": not a dataset file (bad header)");
  }
  std::size_t n = 0;
  {
    const auto pos = header.find("n=");
    if (pos == std::string::npos) throw DataError(path.string() + ": header lacks n=");
    n = std::stoull(header.substr(pos + 2));
  }
  Dataset dataset;
  dataset.n = n;
  dataset.data.resize(n * kDatasetCols);
  in.read(reinterpret_cast<char*>(dataset.data.data()),
          static_cast<std::streamsize>(dataset.data.size() * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != dataset.data.size() * sizeof(float)) {
    throw DataError(path.string() + ": truncated dataset body");
  }
  return dataset;
}

void write_manifest(const std::filesystem::path& dataset_path,
                    const DatasetManifest& manifest) {
  nlohmann::json j;
  j["n"] = manifest.n;
  j["seed"] = manifest.seed;
  j["config_hash"] = manifest.config_hash;
  j["config"] = manifest.config_text;
  j["asset_checksums"] = manifest.asset_checksums;
  j["code_version"] = manifest.code_version;
  j["columns"] = dataset_column_names();
  write_text_file(dataset_path.string() + ".manifest.json", j.dump(1) + "\n");
}

DatasetManifest read_manifest(const std::filesystem::path& dataset_path) {
  const auto text = read_text_file(dataset_path.string() + ".manifest.json");
  const auto j = nlohmann::json::parse(text);
  DatasetManifest m;
  m.n = j.at("n").get<std::uint64_t>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.config_text = j.value("config", std::string{});
  m.code_version = j.value("code_version", std::string{});
  if (j.contains("asset_checksums")) {
    for (const auto& [k, v] : j.at("asset_checksums").items()) {
      m.asset_checksums[k] = v.get<std::string>();
    }
  }
  return m;
}

void export_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write CSV: " + path.string());
  const auto names = dataset_column_names();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << "\n";
  out.precision(9);
  for (std::size_t r = 0; r < dataset.n; ++r) {
    const float* p = dataset.row(r);
    for (int c = 0; c < kDatasetCols; ++c) out << (c ? "," : "") << p[c];
    out << "\n";
  }
}

Dataset generate_dataset(std::size_t n, const SamplerConfig& cfg,
                         std::uint64_t seed, const sail::DecoderTables& tables,
                         int threads) {
  cfg.validate();
  Dataset dataset;
  dataset.n = n;
  dataset.data.resize(n * kDatasetCols);

  const int workers = std::max(1, threads);
  auto fill_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const SimulatedSample s = simulate_sample(cfg, tables, seed, i);
      float* row = dataset.data.data() + i * kDatasetCols;
      for (int c = 0; c < kNumVariables; ++c) {
        row[c] = static_cast<float>(s.params[c]);
      }
      for (int b = 0; b < spectral::kNumBands; ++b) {
        row[kNumVariables + b] = static_cast<float>(s.clean_bands[b]);
        row[kNumVariables + spectral::kNumBands + b] =
            static_cast<float>(s.noisy_bands[b]);
      }
    }
  };

  if (workers == 1) {
    fill_range(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(n, w * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(fill_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  return dataset;
}

DatasetManifest make_manifest(std::size_t n, std::uint64_t seed,
                              const SamplerConfig& cfg,
                              const std::map<std::string, std::string>& checksums) {
  DatasetManifest m;
  m.n = n;
  m.seed = seed;
  m.config_text = cfg.canonical_text();
  m.config_hash = sha256_hex(m.config_text);
  m.asset_checksums = checksums;
  m.code_version = kCodeVersion;
  return m;
}

}  // namespace ptv::sim

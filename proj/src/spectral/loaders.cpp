#include "ptv/spectral/loaders.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ptv/common/error.hpp"
#include "ptv/common/hash.hpp"
#include "ptv/common/table_io.hpp"

namespace ptv::spectral {

void SpectralGrid::validate() const {
  if (!(step_nm > 0.0)) throw DomainError("SpectralGrid: step must be positive");
  if (count < 2) throw DomainError("SpectralGrid: need at least two samples");
}

std::vector<double> resample_linear(const std::vector<double>& wavelengths,
                                    const std::vector<double>& values,
                                    const SpectralGrid& target) {
  if (wavelengths.size() != values.size() || wavelengths.size() < 2) {
    throw DataError("resample_linear: bad source axis");
  }
  // exact match: identity
  if (static_cast<int>(wavelengths.size()) == target.count) {
    bool same = true;
    for (int i = 0; i < target.count && same; ++i) {
      same = wavelengths[i] == target.wavelength(i);
    }
    if (same) return values;
  }
  std::vector<double> out(target.count);
  std::size_t seg = 0;
  for (int i = 0; i < target.count; ++i) {
    const double wl = target.wavelength(i);
    if (wl < wavelengths.front() - 1e-9 || wl > wavelengths.back() + 1e-9) {
      throw DataError("resample_linear: target wavelength " + std::to_string(wl) +
                      " outside source coverage");
    }
    while (seg + 2 < wavelengths.size() && wavelengths[seg + 1] < wl) ++seg;
    const double w0 = wavelengths[seg];
    const double w1 = wavelengths[seg + 1];
    const double t = std::clamp((wl - w0) / (w1 - w0), 0.0, 1.0);
    out[i] = (1.0 - t) * values[seg] + t * values[seg + 1];
  }
  return out;
}

namespace {

struct Columns {
  std::vector<double> wavelengths;
  std::vector<std::vector<double>> cols;
  std::vector<std::string> comments;
  std::vector<int> line_numbers;
};

Columns read_columns(const std::filesystem::path& path, std::size_t expected,
                     const char* what) {
  const NumericTable table = read_numeric_table(path);
  if (table.rows.empty()) throw DataError(path.string() + ": empty " + what + " table");
  const std::size_t width = table.rows.front().size();
  if (expected != 0 && width != expected) {
    throw DataError(path.string() + ": expected " + std::to_string(expected) +
                    " columns, found " + std::to_string(width));
  }
  Columns out;
  out.comments = table.comments;
  out.cols.resize(width - 1);
  double prev = -1e300;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != width) {
      throw DataError(path.string() + ":" + std::to_string(table.line_numbers[r]) +
                      ": ragged row");
    }
    if (row[0] <= prev) {
      throw DataError(path.string() + ":" + std::to_string(table.line_numbers[r]) +
                      ": non-monotonic grid (wavelength " + std::to_string(row[0]) + ")");
    }
    prev = row[0];
    out.wavelengths.push_back(row[0]);
    out.line_numbers.push_back(table.line_numbers[r]);
    for (std::size_t c = 1; c < width; ++c) out.cols[c - 1].push_back(row[c]);
  }
  return out;
}

}  // namespace

LeafCoefficientTables load_coefficient_tables(const std::filesystem::path& path) {
  const Columns data = read_columns(path, 7, "coefficient");

  // model grid: 1 nm samples covered by both the file and 400-2500 nm
  const double lo = std::max(400.0, std::ceil(data.wavelengths.front()));
  const double hi = std::min(2500.0, std::floor(data.wavelengths.back()));
  if (hi - lo < 1.0) throw DataError(path.string() + ": insufficient spectral coverage");
  SpectralGrid grid{lo, 1.0, static_cast<int>(hi - lo) + 1};
  grid.validate();

  for (std::size_t r = 0; r < data.wavelengths.size(); ++r) {
    for (std::size_t c = 1; c < data.cols.size(); ++c) {
      if (data.cols[c][r] < 0.0) {
        throw DataError(path.string() + ":" + std::to_string(data.line_numbers[r]) +
                        ": negative absorption coefficient in column " +
                        std::to_string(c + 2));
      }
    }
    if (data.cols[0][r] <= 1.0) {
      throw DataError(path.string() + ":" + std::to_string(data.line_numbers[r]) +
                      ": refractive index must exceed 1");
    }
  }

  LeafCoefficientTables out;
  out.grid = grid;
  auto curve = [&](int c) {
    return SpectrumCurve{grid, resample_linear(data.wavelengths, data.cols[c], grid)};
  };
  out.refractive_index = curve(0);
  out.k_cab = curve(1);
  out.k_car = curve(2);
  out.k_brown = curve(3);
  out.k_cw = curve(4);
  out.k_cm = curve(5);
  return out;
}

SoilBasis load_soil(const std::filesystem::path& path, const SpectralGrid& grid) {
  const Columns data = read_columns(path, 3, "soil");
  SoilBasis out;
  out.dry = SpectrumCurve{grid, resample_linear(data.wavelengths, data.cols[0], grid)};
  out.wet = SpectrumCurve{grid, resample_linear(data.wavelengths, data.cols[1], grid)};
  for (const SpectrumCurve* curve : {&out.dry, &out.wet}) {
    for (double v : curve->values) {
      if (v < 0.0 || v > 1.0) {
        throw DataError(path.string() + ": soil reflectance outside [0, 1]");
      }
    }
  }
  return out;
}

SensorResponse load_srf(const std::filesystem::path& path, const SpectralGrid& grid) {
  const Columns data = read_columns(path, 0, "response");
  const std::size_t n_bands = data.cols.size();

  std::vector<std::string> ids;
  for (const std::string& comment : data.comments) {
    const auto pos = comment.find("columns:");
    if (pos == std::string::npos) continue;
    std::istringstream names(comment.substr(pos + 8));
    std::vector<std::string> tokens;
    std::string tok;
    while (names >> tok) tokens.push_back(tok);
    if (tokens.size() == n_bands + 1) {
      ids.assign(tokens.begin() + 1, tokens.end());
    }
  }
  if (ids.empty()) {
    for (std::size_t b = 0; b < n_bands; ++b) ids.push_back("band" + std::to_string(b + 1));
  }

  if (n_bands != kNumBands) {
    std::ostringstream msg;
    msg << path.string() << ": expected " << kNumBands << " bands, found "
        << n_bands << " (";
    for (std::size_t b = 0; b < ids.size(); ++b) msg << (b ? ", " : "") << ids[b];
    msg << ")";
    throw DataError(msg.str());
  }

  SensorResponse out;
  out.grid = grid;
  for (std::size_t b = 0; b < n_bands; ++b) {
    SensorResponse::Band band;
    band.id = ids[b];
    band.weights.grid = grid;
    band.weights.values.assign(grid.count, 0.0);
    // zero padding outside the listed support
    for (std::size_t r = 0; r < data.wavelengths.size(); ++r) {
      const double w = data.cols[b][r];
      if (w < 0.0) throw DataError(path.string() + ": negative response weight");
      const double pos = (data.wavelengths[r] - grid.start_nm) / grid.step_nm;
      const int idx = static_cast<int>(std::lround(pos));
      if (std::fabs(pos - idx) > 1e-6) {
        throw DataError(path.string() + ": response wavelengths must sit on the model grid");
      }
      if (idx < 0 || idx >= grid.count) continue;
      band.weights.values[idx] = w;
    }
    int first = -1, last = -1;
    double sum = 0.0;
    for (int i = 0; i < grid.count; ++i) {
      if (band.weights.values[i] > 0.0) {
        if (first < 0) first = i;
        last = i;
      }
    }
    if (first < 0) throw DataError(path.string() + ": band " + band.id + " has no support");
    for (int i = first; i <= last; ++i) sum += band.weights.values[i];
    band.support_offset = first;
    band.support_length = last - first + 1;
    band.weight_sum = sum;
    out.bands.push_back(std::move(band));
  }
  return out;
}

std::vector<ChecksumEntry> verify_checksums(const std::filesystem::path& asset_dir) {
  const auto manifest_path = asset_dir / "manifest.sha256";
  const std::string text = read_text_file(manifest_path);
  std::vector<ChecksumEntry> entries;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    ChecksumEntry entry;
    if (!(fields >> entry.name >> entry.expected)) continue;
    entry.actual = sha256_file(asset_dir / entry.name);
    entry.ok = entry.actual == entry.expected;
    entries.push_back(std::move(entry));
  }
  if (entries.empty()) throw DataError(manifest_path.string() + ": empty manifest");
  return entries;
}

RetrievalAssets RetrievalAssets::load(const std::filesystem::path& asset_dir,
                                      bool verify) {
  RetrievalAssets assets;
  if (verify) {
    for (const ChecksumEntry& entry : verify_checksums(asset_dir)) {
      assets.checksums[entry.name] = entry.actual;
      if (!entry.ok) {
        throw DataError("asset checksum mismatch for " + entry.name +
                        ": expected " + entry.expected + ", got " + entry.actual);
      }
    }
  }
  assets.tables = load_coefficient_tables(asset_dir / "prospect5_coefficients.txt");
  assets.grid = assets.tables.grid;
  assets.soil = load_soil(asset_dir / "soil_spectra.txt", assets.grid);
  assets.srf = load_srf(asset_dir / "sentinel2_srf.txt", assets.grid);
  return assets;
}

}  // namespace ptv::spectral

#include "ptv/sail/decoder_tables.hpp"

#include <algorithm>

#include "ptv/common/error.hpp"

namespace ptv::sail {

namespace {

DecoderTables from_indices(const spectral::RetrievalAssets& assets,
                           const std::vector<int>& indices, bool compact) {
  DecoderTables dt;
  dt.full_grid = assets.grid;
  dt.compact = compact;
  dt.index_map = indices;
  dt.count = static_cast<int>(indices.size());

  const prospect::PlateConstants full =
      prospect::PlateConstants::build(assets.tables);
  if (compact) {
    dt.plate = full.gather(indices);
    dt.soil_dry.resize(indices.size());
    dt.soil_wet.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
      dt.soil_dry[i] = assets.soil.dry.values[indices[i]];
      dt.soil_wet[i] = assets.soil.wet.values[indices[i]];
    }
  } else {
    dt.plate = full;
    dt.soil_dry = assets.soil.dry.values;
    dt.soil_wet = assets.soil.wet.values;
  }

  // active position of each full-grid index
  std::vector<int> position(assets.grid.count, -1);
  for (std::size_t i = 0; i < indices.size(); ++i) position[indices[i]] = static_cast<int>(i);

  for (const auto& band : assets.srf.bands) {
    DecoderTables::BandWindow window;
    window.id = band.id;
    window.weight_sum = band.weight_sum;
    const int first = band.support_offset;
    const int last = band.support_offset + band.support_length - 1;
    if (position[first] < 0 || position[last] < 0 ||
        position[last] - position[first] != last - first) {
      throw DomainError("DecoderTables: band support not contiguous in the "
                        "active wavelength set");
    }
    window.offset = position[first];
    window.weights.assign(band.weights.values.begin() + first,
                          band.weights.values.begin() + last + 1);
    dt.bands.push_back(std::move(window));
  }
  return dt;
}

}  // namespace

DecoderTables DecoderTables::build_full(const spectral::RetrievalAssets& assets) {
  std::vector<int> indices(assets.grid.count);
  for (int i = 0; i < assets.grid.count; ++i) indices[i] = i;
  return from_indices(assets, indices, false);
}

DecoderTables DecoderTables::build_compact(const spectral::RetrievalAssets& assets) {
  std::vector<char> keep(assets.grid.count, 0);
  for (const auto& band : assets.srf.bands) {
    for (int i = 0; i < band.support_length; ++i) {
      keep[band.support_offset + i] = 1;
    }
  }
  std::vector<int> indices;
  for (int i = 0; i < assets.grid.count; ++i) {
    if (keep[i]) indices.push_back(i);
  }
  return from_indices(assets, indices, true);
}

}  // namespace ptv::sail

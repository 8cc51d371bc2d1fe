#include "ptv/sail/forward.hpp"

#include <array>

#include "ptv/common/error.hpp"

namespace ptv::sail {

ForwardInputsTaped make_forward_inputs(diff::Tape& tape, const ParameterVector& pv) {
  return ForwardInputsTaped{
      tape.input(pv[kN]),       tape.input(pv[kCab]),
      tape.input(pv[kCar]),     tape.input(pv[kCbrown]),
      tape.input(pv[kCw]),      tape.input(pv[kCm]),
      tape.input(pv[kLai]),     tape.input(pv[kAla]),
      tape.input(pv[kHotspot]), tape.input(pv[kSoilWet]),
      tape.input(pv[kSoilBright])};
}

diff::Value prosail_spectrum_taped(diff::Tape& tape,
                                   const ForwardInputsTaped& in,
                                   const GeometryFactors& geom,
                                   const DecoderTables& tables) {
  const prospect::LeafInputsTaped leaf_in{in.n_struct, in.cab, in.car,
                                          in.cbrown,   in.cw,  in.cm};
  const prospect::LeafOpticsTaped leaf =
      prospect::prospect5_taped(tape, leaf_in, tables.plate);
  const diff::Value soil = soil_spectrum_taped(tape, in.soil_wet, in.soil_bright,
                                               tables.soil_dry, tables.soil_wet);
  const CanopyInputsTaped canopy{in.lai, in.ala_deg, in.hotspot};
  return sail4_taped(tape, leaf, canopy, geom, soil);
}

diff::Value prosail_bands_taped(diff::Tape& tape, const ForwardInputsTaped& in,
                                const GeometryFactors& geom,
                                const DecoderTables& tables) {
  const diff::Value spectrum = prosail_spectrum_taped(tape, in, geom, tables);
  std::array<diff::Value, spectral::kNumBands> bands;
  for (int b = 0; b < spectral::kNumBands; ++b) {
    const auto& window = tables.bands[b];
    const diff::Value num = tape.weighted_window_sum(
        spectrum, window.offset, window.weights.data(),
        static_cast<int>(window.weights.size()));
    bands[b] = num / window.weight_sum;
  }
  return tape.concat(std::span<const diff::Value>(bands));
}

spectral::BandReflectance prosail_forward(const ParameterVector& pv,
                                          const DecoderTables& tables) {
  prospect::validate_leaf_params(pv.leaf());
  validate_canopy_params(pv.canopy());
  validate_geometry(pv.geometry());

  static thread_local diff::Tape tape;
  tape.reset();
  const ForwardInputsTaped inputs = make_forward_inputs(tape, pv);
  const GeometryFactors geom = GeometryFactors::compute(pv.geometry());
  const diff::Value bands = prosail_bands_taped(tape, inputs, geom, tables);
  spectral::BandReflectance out;
  const auto v = bands.values();
  for (int b = 0; b < spectral::kNumBands; ++b) out[b] = v[b];
  return out;
}

}  // namespace ptv::sail

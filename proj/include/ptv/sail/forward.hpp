#pragma once

#include "ptv/sail/decoder_tables.hpp"
#include "ptv/sail/sail.hpp"

namespace ptv::sail {

// The 11 retrievable inputs as tape nodes; geometry stays a plain constant.
struct ForwardInputsTaped {
  diff::Value n_struct, cab, car, cbrown, cw, cm;
  diff::Value lai, ala_deg, hotspot, soil_wet, soil_bright;
};

// leaf model -> soil model -> canopy model over the active wavelengths
diff::Value prosail_spectrum_taped(diff::Tape& tape,
                                   const ForwardInputsTaped& in,
                                   const GeometryFactors& geom,
                                   const DecoderTables& tables);

// band-averaged reflectance (length-10 node)
diff::Value prosail_bands_taped(diff::Tape& tape, const ForwardInputsTaped& in,
                                const GeometryFactors& geom,
                                const DecoderTables& tables);

// plain evaluation of the full pipeline
spectral::BandReflectance prosail_forward(const ParameterVector& pv,
                                          const DecoderTables& tables);

// registers the 11 physical values as tape inputs, in canonical order
ForwardInputsTaped make_forward_inputs(diff::Tape& tape, const ParameterVector& pv);

}  // namespace ptv::sail

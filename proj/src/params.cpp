#include "ptv/params.hpp"

#include <cmath>

namespace ptv {

int variable_index(std::string_view name) {
  for (int i = 0; i < kNumVariables; ++i) {
    if (name == kVariableTable[i].name) return i;
  }
  return -1;
}

ParameterVector ParameterVector::midpoint() {
  ParameterVector pv;
  for (int i = 0; i < kNumVariables; ++i) {
    pv.values[i] = 0.5 * (kVariableTable[i].lower + kVariableTable[i].upper);
  }
  return pv;
}

LeafParams ParameterVector::leaf() const {
  return {values[kN], values[kCab], values[kCar],
          values[kCbrown], values[kCw], values[kCm]};
}

CanopyParams ParameterVector::canopy() const {
  return {values[kLai], values[kAla], values[kHotspot],
          values[kSoilWet], values[kSoilBright]};
}

ViewGeometry ParameterVector::geometry() const {
  return {values[kSunZenith], values[kViewZenith], values[kRelAzimuth]};
}

void ParameterVector::set_leaf(const LeafParams& p) {
  values[kN] = p.n_struct;
  values[kCab] = p.cab;
  values[kCar] = p.car;
  values[kCbrown] = p.cbrown;
  values[kCw] = p.cw;
  values[kCm] = p.cm;
}

void ParameterVector::set_canopy(const CanopyParams& p) {
  values[kLai] = p.lai;
  values[kAla] = p.ala_deg;
  values[kHotspot] = p.hotspot;
  values[kSoilWet] = p.soil_wet;
  values[kSoilBright] = p.soil_bright;
}

void ParameterVector::set_geometry(const ViewGeometry& g) {
  values[kSunZenith] = g.sun_zenith_deg;
  values[kViewZenith] = g.view_zenith_deg;
  values[kRelAzimuth] = g.rel_azimuth_deg;
}

bool ParameterVector::within_bounds(double tol) const {
  for (int i = 0; i < kNumVariables; ++i) {
    if (values[i] < kVariableTable[i].lower - tol ||
        values[i] > kVariableTable[i].upper + tol) {
      return false;
    }
  }
  return true;
}

}  // namespace ptv

#pragma once

#include <array>
#include <string_view>

namespace ptv {

// Canonical ordering of the forward-model inputs. The first 11 are the
// retrievable physical variables; the final three are viewing geometry and
// are never latent.
enum VariableIndex : int {
  kN = 0, kCab, kCar, kCbrown, kCw, kCm,
  kLai, kAla, kHotspot, kSoilWet, kSoilBright,
  kSunZenith, kViewZenith, kRelAzimuth,
  kNumVariables,
};

inline constexpr int kNumLatentVariables = 11;

enum class Family { kTruncatedNormal, kUniform };

struct VariableInfo {
  const char* name;
  Family family;
  double lower;
  double upper;
  const char* unit;
};

// Sampling bounds double as the latent support during inversion.
inline constexpr std::array<VariableInfo, kNumVariables> kVariableTable = {{
    {"N", Family::kTruncatedNormal, 1.2, 1.8, "-"},
    {"Cab", Family::kTruncatedNormal, 20.0, 90.0, "ug/cm2"},
    {"Car", Family::kTruncatedNormal, 5.0, 23.0, "ug/cm2"},
    {"Cbrown", Family::kTruncatedNormal, 0.0, 2.0, "a.u."},
    {"Cw", Family::kTruncatedNormal, 0.0075, 0.075, "cm"},
    {"Cm", Family::kTruncatedNormal, 0.003, 0.011, "g/cm2"},
    {"LAI", Family::kTruncatedNormal, 0.0, 10.0, "-"},
    {"ALA", Family::kTruncatedNormal, 30.0, 80.0, "deg"},
    {"Hotspot", Family::kTruncatedNormal, 0.0, 0.5, "-"},
    {"SoilWet", Family::kUniform, 0.0, 1.0, "-"},
    {"SoilBright", Family::kTruncatedNormal, 0.3, 3.5, "-"},
    {"SunZenith", Family::kUniform, 15.0, 60.0, "deg"},
    {"ViewZenith", Family::kUniform, 0.0, 10.0, "deg"},
    {"RelAzimuth", Family::kUniform, 0.0, 180.0, "deg"},
}};

// -1 when the name is unknown
int variable_index(std::string_view name);

struct LeafParams {
  double n_struct = 1.5;
  double cab = 55.0;
  double car = 14.0;
  double cbrown = 1.0;
  double cw = 0.04125;
  double cm = 0.007;
};

struct CanopyParams {
  double lai = 5.0;
  double ala_deg = 55.0;
  double hotspot = 0.25;
  double soil_wet = 0.5;
  double soil_bright = 1.9;
};

struct ViewGeometry {
  double sun_zenith_deg = 37.5;
  double view_zenith_deg = 5.0;
  double rel_azimuth_deg = 90.0;
};

struct ParameterVector {
  std::array<double, kNumVariables> values{};

  static ParameterVector midpoint();

  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }

  LeafParams leaf() const;
  CanopyParams canopy() const;
  ViewGeometry geometry() const;

  void set_leaf(const LeafParams& p);
  void set_canopy(const CanopyParams& p);
  void set_geometry(const ViewGeometry& g);

  // true when every variable sits inside its table interval (inclusive)
  bool within_bounds(double tol = 0.0) const;
};

}  // namespace ptv

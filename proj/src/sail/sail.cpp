#include "ptv/sail/sail.hpp"

#include <cmath>

#include "ptv/common/error.hpp"

namespace ptv::sail {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

struct VolScatt {
  double chi_s, chi_o, frho, ftau;
};

// Bidirectional volume scattering factors for one leaf inclination class
// (Verhoef's geometric kernel).
VolScatt volscatt(double tts, double tto, double psi, double ttl) {
  const double cts = std::cos(tts * kDegToRad);
  const double cto = std::cos(tto * kDegToRad);
  const double sts = std::sin(tts * kDegToRad);
  const double sto = std::sin(tto * kDegToRad);
  const double cospsi = std::cos(psi * kDegToRad);
  const double psir = psi * kDegToRad;
  const double cttl = std::cos(ttl * kDegToRad);
  const double sttl = std::sin(ttl * kDegToRad);
  const double cs = cttl * cts;
  const double co = cttl * cto;
  const double ss = sttl * sts;
  const double so = sttl * sto;

  double cosbts = 5.0;
  if (std::fabs(ss) > 1e-6) cosbts = -cs / ss;
  double cosbto = 5.0;
  if (std::fabs(so) > 1e-6) cosbto = -co / so;

  double bts, ds;
  if (std::fabs(cosbts) < 1.0) {
    bts = std::acos(cosbts);
    ds = ss;
  } else {
    bts = M_PI;
    ds = cs;
  }
  const double chi_s = 2.0 / M_PI * ((bts - M_PI * 0.5) * cs + std::sin(bts) * ss);

  double bto, do_;
  if (std::fabs(cosbto) < 1.0) {
    bto = std::acos(cosbto);
    do_ = so;
  } else if (tto < 90.0) {
    bto = M_PI;
    do_ = co;
  } else {
    bto = 0.0;
    do_ = -co;
  }
  const double chi_o = 2.0 / M_PI * ((bto - M_PI * 0.5) * co + std::sin(bto) * so);

  const double btran1 = std::fabs(bts - bto);
  const double btran2 = M_PI - std::fabs(bts + bto - M_PI);
  double bt1, bt2, bt3;
  if (psir <= btran1) {
    bt1 = psir;
    bt2 = btran1;
    bt3 = btran2;
  } else {
    bt1 = btran1;
    if (psir <= btran2) {
      bt2 = psir;
      bt3 = btran2;
    } else {
      bt2 = btran2;
      bt3 = psir;
    }
  }

  const double t1 = 2.0 * cs * co + ss * so * cospsi;
  double t2 = 0.0;
  if (bt2 > 0.0) {
    t2 = std::sin(bt2) * (2.0 * ds * do_ + ss * so * std::cos(bt1) * std::cos(bt3));
  }
  const double denom = 2.0 * M_PI * M_PI;
  const double frho = ((M_PI - bt2) * t1 + t2) / denom;
  const double ftau = (-bt2 * t1 + t2) / denom;
  return {chi_s, chi_o, std::max(frho, 0.0), std::max(ftau, 0.0)};
}

}  // namespace

GeometryFactors GeometryFactors::compute(const ViewGeometry& geom) {
  GeometryFactors g;
  const double tts = geom.sun_zenith_deg;
  const double tto = geom.view_zenith_deg;
  const double psi = geom.rel_azimuth_deg;
  g.cts = std::cos(tts * kDegToRad);
  g.cto = std::cos(tto * kDegToRad);
  g.ctscto = g.cts * g.cto;
  const double tants = std::tan(tts * kDegToRad);
  const double tanto = std::tan(tto * kDegToRad);
  const double cospsi = std::cos(psi * kDegToRad);
  g.dso = std::sqrt(std::max(
      tants * tants + tanto * tanto - 2.0 * tants * tanto * cospsi, 0.0));
  for (int i = 0; i < kLidfClasses; ++i) {
    const double ttl = kLidfMidDeg[i];
    const VolScatt v = volscatt(tts, tto, psi, ttl);
    g.ksli[i] = v.chi_s / g.cts;
    g.koli[i] = v.chi_o / g.cto;
    g.sobli[i] = v.frho * M_PI / g.ctscto;
    g.sofli[i] = v.ftau * M_PI / g.ctscto;
    const double cttl = std::cos(ttl * kDegToRad);
    g.bfli[i] = cttl * cttl;
  }
  return g;
}

void validate_canopy_params(const CanopyParams& c) {
  if (c.lai < 0.0) throw DomainError("sail4: LAI must be non-negative");
  if (!(c.ala_deg > 0.0 && c.ala_deg < 90.0)) {
    throw DomainError("sail4: mean leaf angle must lie in (0, 90)");
  }
  if (c.hotspot < 0.0) throw DomainError("sail4: hotspot must be non-negative");
  if (!(c.soil_wet >= 0.0 && c.soil_wet <= 1.0)) {
    throw DomainError("sail4: soil wetness must lie in [0, 1]");
  }
  if (!(c.soil_bright > 0.0)) {
    throw DomainError("sail4: soil brightness must be positive");
  }
}

void validate_geometry(const ViewGeometry& g) {
  if (!(g.sun_zenith_deg >= 0.0 && g.sun_zenith_deg < 90.0) ||
      !(g.view_zenith_deg >= 0.0 && g.view_zenith_deg < 90.0)) {
    throw DomainError("sail4: zenith angles must lie in [0, 90)");
  }
}

spectral::SpectrumCurve soil_spectrum(double soil_wet, double soil_bright,
                                      const spectral::SoilBasis& basis) {
  if (!(soil_wet >= 0.0 && soil_wet <= 1.0)) {
    throw DomainError("soil_spectrum: wetness must lie in [0, 1]");
  }
  if (!(soil_bright > 0.0)) {
    throw DomainError("soil_spectrum: brightness must be positive");
  }
  spectral::SpectrumCurve out;
  out.grid = basis.dry.grid;
  out.values.resize(basis.dry.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double mix = soil_bright * (soil_wet * basis.wet.values[i] +
                                      (1.0 - soil_wet) * basis.dry.values[i]);
    out.values[i] = std::clamp(mix, 0.0, 1.0);
  }
  return out;
}

diff::Value soil_spectrum_taped(diff::Tape& tape, const diff::Value& soil_wet,
                                const diff::Value& soil_bright,
                                const std::vector<double>& dry,
                                const std::vector<double>& wet) {
  using diff::Value;
  const Value dry_c = tape.constant(std::span<const double>(dry));
  const Value wet_c = tape.constant(std::span<const double>(wet));
  const Value mix = soil_bright * (soil_wet * wet_c + (1.0 - soil_wet) * dry_c);
  // clipped wavelengths carry zero gradient
  return clamp(mix, 0.0, 1.0);
}

namespace {

// J1(k, l, t) = (e^{-l t} - e^{-k t}) / (k - l) with the series branch at
// the removable k ~ l singularity.
diff::Value jfunc1_taped(diff::Tape& tape, const diff::Value& k_scalar,
                         const diff::Value& m_vec, const diff::Value& lai,
                         const diff::Value& e_ml, const diff::Value& e_kl) {
  using diff::Value;
  const Value del = (k_scalar - m_vec) * lai;
  const Value absd = diff::abs(del);
  const Value one = tape.constant(1.0);
  const Value denom_safe = select_ge(absd, 1e-3, k_scalar - m_vec, one);
  const Value exact = (e_ml - e_kl) / denom_safe;
  const Value series =
      0.5 * lai * (e_kl + e_ml) * (1.0 - square(del) / 12.0);
  return select_ge(absd, 1e-3, exact, series);
}

struct HotspotTerms {
  diff::Value tsstoo;
  diff::Value sumint;
};

HotspotTerms hotspot_taped(diff::Tape& tape, const diff::Value& lai,
                           const diff::Value& hotspot, const diff::Value& ks,
                           const diff::Value& ko, const diff::Value& tss,
                           double dso) {
  using diff::Value;
  if (hotspot.scalar() <= 0.0) {
    const Value kskol = (ks + ko) * lai;
    const Value tsstoo = diff::exp(-kskol);
    const Value sumint = (1.0 - diff::exp(-kskol)) / kskol;
    return {tsstoo, sumint};
  }
  const Value alf = (dso / hotspot) * (2.0 / (ks + ko));
  if (alf.scalar() < 1e-12) {
    // exact backscatter: analytic limit of the hotspot integral
    const Value sumint = (1.0 - tss) / (ks * lai);
    return {tss, sumint};
  }
  const Value fhot = lai * diff::sqrt(ko * ks);
  const Value fint = (1.0 - diff::exp(-alf)) * 0.05;
  Value x1 = tape.constant(0.0);
  Value y1 = tape.constant(0.0);
  Value f1 = tape.constant(1.0);
  Value sumint = tape.constant(0.0);
  for (int istep = 1; istep <= 20; ++istep) {
    const Value x2 = istep < 20
                         ? -diff::log(1.0 - static_cast<double>(istep) * fint) / alf
                         : tape.constant(1.0);
    const Value y2 =
        -(ko + ks) * lai * x2 + fhot * (1.0 - diff::exp(-(alf * x2))) / alf;
    const Value f2 = diff::exp(y2);
    sumint = sumint + (f2 - f1) * (x2 - x1) / (y2 - y1);
    x1 = x2;
    y1 = y2;
    f1 = f2;
  }
  return {f1, sumint};
}

}  // namespace

diff::Value sail4_taped(diff::Tape& tape, const prospect::LeafOpticsTaped& leaf,
                        const CanopyInputsTaped& canopy,
                        const GeometryFactors& g, const diff::Value& soil) {
  using diff::Value;
  if (canopy.lai.scalar() < 0.0) throw DomainError("sail4: LAI must be non-negative");
  if (canopy.lai.scalar() == 0.0) return soil;  // bare soil, exact

  const Value rho = leaf.reflectance;
  const Value tau = leaf.transmittance;
  const Value lai = canopy.lai;

  const Value lidf = campbell_lidf_taped(tape, canopy.ala_deg);
  auto weighted = [&](const std::array<double, kLidfClasses>& coeff) {
    const Value c = tape.constant(std::span<const double>(coeff));
    return diff::dot(lidf, c);
  };
  const Value ks = weighted(g.ksli);
  const Value ko = weighted(g.koli);
  const Value bf = weighted(g.bfli);
  const Value sob = weighted(g.sobli);
  const Value sof = weighted(g.sofli);

  const Value sdb = 0.5 * (ks + bf);
  const Value sdf = 0.5 * (ks - bf);
  const Value dob = 0.5 * (ko + bf);
  const Value dof = 0.5 * (ko - bf);
  const Value ddb = 0.5 * (1.0 + bf);
  const Value ddf = 0.5 * (1.0 - bf);

  const Value sigb = ddb * rho + ddf * tau;
  const Value sigf = ddf * rho + ddb * tau;
  const Value att = 1.0 - sigf;
  const Value m = diff::sqrt(max((att + sigb) * (att - sigb), 1e-30));
  const Value sb = sdb * rho + sdf * tau;
  const Value sf = sdf * rho + sdb * tau;
  const Value vb = dob * rho + dof * tau;
  const Value vf = dof * rho + dob * tau;
  const Value w = sob * rho + sof * tau;

  const Value e1 = diff::exp(-(m * lai));
  const Value e2 = square(e1);
  const Value rinf = (att - m) / sigb;
  const Value rinf2 = square(rinf);
  const Value re = rinf * e1;
  const Value denom = 1.0 - rinf2 * e2;

  const Value tss = diff::exp(-(ks * lai));
  const Value too = diff::exp(-(ko * lai));

  const Value j1ks = jfunc1_taped(tape, ks, m, lai, e1, tss);
  const Value j2ks = (1.0 - tss * e1) / (ks + m);
  const Value j1ko = jfunc1_taped(tape, ko, m, lai, e1, too);
  const Value j2ko = (1.0 - too * e1) / (ko + m);

  const Value ps = (sf + sb * rinf) * j1ks;
  const Value qs = (sf * rinf + sb) * j2ks;
  const Value pv = (vf + vb * rinf) * j1ko;
  const Value qv = (vf * rinf + vb) * j2ko;

  const Value rdd = rinf * (1.0 - e2) / denom;
  const Value tsd = (ps - re * qs) / denom;
  const Value tdo = (pv - re * qv) / denom;
  const Value rdo = (qv - re * pv) / denom;

  const Value z = (1.0 - tss * too) / (ks + ko);
  const Value g1 = (z - j1ks * too) / (ko + m);
  const Value g2 = (z - j1ko * tss) / (ks + m);

  const Value tv1 = (vf * rinf + vb) * g1;
  const Value tv2 = (vf + vb * rinf) * g2;
  const Value t1 = tv1 * (sf + sb * rinf);
  const Value t2 = tv2 * (sf * rinf + sb);
  const Value t3 = (rdo * qs + tdo * ps) * rinf;
  const Value rsod = (t1 + t2 - t3) / (1.0 - rinf2);

  const HotspotTerms hs =
      hotspot_taped(tape, lai, canopy.hotspot, ks, ko, tss, g.dso);

  const Value rsos = w * lai * hs.sumint;
  const Value rso = rsos + rsod;

  const Value dn = 1.0 - soil * rdd;
  const Value rsost = rso + hs.tsstoo * soil;
  const Value rsodt =
      ((tss + tsd) * tdo + (tsd + tss * soil * rdd) * too) * soil / dn;
  return rsost + rsodt;
}

spectral::SpectrumCurve sail4(const prospect::LeafOptics& leaf,
                              const CanopyParams& canopy,
                              const ViewGeometry& geom,
                              const spectral::SpectrumCurve& soil) {
  validate_canopy_params(canopy);
  validate_geometry(geom);
  if (!(leaf.reflectance.grid == soil.grid)) {
    throw DomainError("sail4: leaf optics and soil spectrum grids differ");
  }
  diff::Tape tape;
  prospect::LeafOpticsTaped leaf_taped{
      tape.constant(std::span<const double>(leaf.reflectance.values)),
      tape.constant(std::span<const double>(leaf.transmittance.values))};
  CanopyInputsTaped canopy_taped{tape.input(canopy.lai),
                                 tape.input(canopy.ala_deg),
                                 tape.input(canopy.hotspot)};
  const diff::Value soil_taped =
      tape.constant(std::span<const double>(soil.values));
  const GeometryFactors g = GeometryFactors::compute(geom);
  const diff::Value brf = sail4_taped(tape, leaf_taped, canopy_taped, g, soil_taped);
  spectral::SpectrumCurve out;
  out.grid = soil.grid;
  const auto v = brf.values();
  out.values.assign(v.begin(), v.end());
  return out;
}

}  // namespace ptv::sail

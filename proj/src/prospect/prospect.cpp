#include "ptv/prospect/prospect.hpp"

#include <cmath>

#include "ptv/common/error.hpp"

namespace ptv::prospect {

double tav(double alpha_deg, double n) {
  if (!(alpha_deg > 0.0 && alpha_deg <= 90.0)) {
    throw DomainError("tav: alpha must lie in (0, 90] degrees");
  }
  if (!(n > 1.0)) throw DomainError("tav: refractive index must exceed 1");

  const double theta = alpha_deg * M_PI / 180.0;
  const double r2 = n * n;
  const double rp = r2 + 1.0;
  const double rm = r2 - 1.0;
  const double a = (n + 1.0) * (n + 1.0) / 2.0;
  const double k = -(r2 - 1.0) * (r2 - 1.0) / 4.0;
  const double ds = std::sin(theta);
  const double k2 = k * k;
  const double rm2 = rm * rm;

  double b1 = 0.0;
  if (alpha_deg != 90.0) {
    const double t = ds * ds - rp / 2.0;
    b1 = std::sqrt(t * t + k);
  }
  const double b2 = ds * ds - rp / 2.0;
  const double b = b1 - b2;
  const double b3 = b * b * b;
  const double a3 = a * a * a;
  const double ts = (k2 / (6.0 * b3) + k / b - b / 2.0) -
                    (k2 / (6.0 * a3) + k / a - a / 2.0);
  const double tp1 = -2.0 * r2 * (b - a) / (rp * rp);
  const double tp2 = -2.0 * r2 * rp * std::log(b / a) / rm2;
  const double tp3 = r2 * (1.0 / b - 1.0 / a) / 2.0;
  const double tp4 = 16.0 * r2 * r2 * (r2 * r2 + 1.0) *
                     std::log((2.0 * rp * b - rm2) / (2.0 * rp * a - rm2)) /
                     (rp * rp * rp * rm2);
  const double tp5 = 16.0 * r2 * r2 * r2 *
                     (1.0 / (2.0 * rp * b - rm2) - 1.0 / (2.0 * rp * a - rm2)) /
                     (rp * rp * rp);
  const double tp = tp1 + tp2 + tp3 + tp4 + tp5;
  return (ts + tp) / (2.0 * ds * ds);
}

PlateConstants PlateConstants::build(const spectral::LeafCoefficientTables& tables) {
  PlateConstants pc;
  pc.count = tables.grid.count;
  pc.k_cab = tables.k_cab.values;
  pc.k_car = tables.k_car.values;
  pc.k_brown = tables.k_brown.values;
  pc.k_cw = tables.k_cw.values;
  pc.k_cm = tables.k_cm.values;
  pc.talf.resize(pc.count);
  pc.ralf.resize(pc.count);
  pc.t12.resize(pc.count);
  pc.r12.resize(pc.count);
  pc.t21.resize(pc.count);
  pc.r21.resize(pc.count);
  for (int i = 0; i < pc.count; ++i) {
    const double n = tables.refractive_index.values[i];
    pc.talf[i] = tav(40.0, n);
    pc.ralf[i] = 1.0 - pc.talf[i];
    pc.t12[i] = tav(90.0, n);
    pc.r12[i] = 1.0 - pc.t12[i];
    pc.t21[i] = pc.t12[i] / (n * n);
    pc.r21[i] = 1.0 - pc.t21[i];
  }
  return pc;
}

PlateConstants PlateConstants::gather(const std::vector<int>& indices) const {
  PlateConstants pc;
  pc.count = static_cast<int>(indices.size());
  auto pick = [&](const std::vector<double>& src) {
    std::vector<double> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) out[i] = src[indices[i]];
    return out;
  };
  pc.k_cab = pick(k_cab);
  pc.k_car = pick(k_car);
  pc.k_brown = pick(k_brown);
  pc.k_cw = pick(k_cw);
  pc.k_cm = pick(k_cm);
  pc.talf = pick(talf);
  pc.ralf = pick(ralf);
  pc.t12 = pick(t12);
  pc.r12 = pick(r12);
  pc.t21 = pick(t21);
  pc.r21 = pick(r21);
  return pc;
}

LeafOpticsTaped prospect5_taped(diff::Tape& tape, const LeafInputsTaped& leaf,
                                const PlateConstants& pc) {
  using diff::Value;
  auto C = [&](const std::vector<double>& v) {
    return tape.constant(std::span<const double>(v));
  };

  const Value k = (leaf.cab * C(pc.k_cab) + leaf.car * C(pc.k_car) +
                   leaf.cbrown * C(pc.k_brown) + leaf.cw * C(pc.k_cw) +
                   leaf.cm * C(pc.k_cm)) /
                  leaf.n_struct;

  // absorbing-plate transmission; the k->0 singularity is removable and
  // handled by the linearized branch
  const Value k_safe = max(k, 1e-8);
  const Value theta_exact =
      (1.0 - k) * diff::exp(-k) + square(k) * diff::expint_e1(k_safe);
  const Value theta_limit = 1.0 - 2.0 * k;
  const Value theta = select_ge(k, 1e-8, theta_exact, theta_limit);

  const Value talf = C(pc.talf);
  const Value ralf = C(pc.ralf);
  const Value t12 = C(pc.t12);
  const Value r12 = C(pc.r12);
  const Value t21 = C(pc.t21);
  const Value r21 = C(pc.r21);

  const Value denom1 = 1.0 - square(r21) * square(theta);
  const Value ta = talf * theta * t21 / denom1;
  const Value ra = ralf + r21 * theta * ta;
  const Value tt = t12 * theta * t21 / denom1;
  const Value rr = r12 + r21 * theta * tt;

  // Stokes doubling for the remaining N-1 layers. Near zero absorption the
  // doubling denominators vanish; those wavelengths take the analytic limit,
  // and the generic branch sees slightly shrunk (r, t) so that it stays
  // finite where it is discarded.
  const Value rt = rr + tt;
  const Value one = tape.constant(1.0);
  const Value shrink = select_ge(rt, 1.0 - 1e-9, (1.0 - 1e-9) / rt, one);
  const Value r_m = rr * shrink;
  const Value t_m = tt * shrink;

  const Value d2 = (1.0 + r_m + t_m) * (1.0 + r_m - t_m) *
                   (1.0 - r_m + t_m) * (1.0 - r_m - t_m);
  const Value d = diff::sqrt(max(d2, 1e-300));
  const Value rq = square(r_m);
  const Value tq = square(t_m);
  const Value aa = (1.0 + rq - tq + d) / (2.0 * r_m);
  const Value bb = (1.0 - rq + tq + d) / (2.0 * t_m);

  const Value n_minus_1 = leaf.n_struct - 1.0;
  const Value b_pow = diff::exp(n_minus_1 * diff::log(bb));
  const Value b_pow2 = square(b_pow);
  const Value a2 = square(aa);
  const Value denom2 = a2 * b_pow2 - 1.0;
  const Value rsub_main = aa * (b_pow2 - 1.0) / denom2;
  const Value tsub_main = b_pow * (a2 - 1.0) / denom2;

  const Value tsub_zero = tt / (tt + (1.0 - tt) * n_minus_1);
  const Value rsub_zero = 1.0 - tsub_zero;

  const Value rsub = select_ge(rt, 1.0, rsub_zero, rsub_main);
  const Value tsub = select_ge(rt, 1.0, tsub_zero, tsub_main);

  const Value denom3 = 1.0 - rsub * rr;
  const Value trans = ta * tsub / denom3;
  const Value refl = ra + ta * rsub * tt / denom3;
  return {refl, trans};
}

void validate_leaf_params(const LeafParams& p) {
  if (!(p.n_struct >= 1.0)) {
    throw DomainError("prospect5: leaf structure parameter must be >= 1");
  }
  for (double v : {p.cab, p.car, p.cbrown, p.cw, p.cm}) {
    if (!(v >= 0.0)) throw DomainError("prospect5: contents must be non-negative");
  }
}

LeafOptics prospect5(const LeafParams& params,
                     const spectral::LeafCoefficientTables& tables) {
  validate_leaf_params(params);
  static thread_local diff::Tape tape;
  tape.reset();
  static thread_local PlateConstants pc;
  static thread_local const spectral::LeafCoefficientTables* cached = nullptr;
  if (cached != &tables) {
    pc = PlateConstants::build(tables);
    cached = &tables;
  }
  LeafInputsTaped leaf{tape.input(params.n_struct), tape.input(params.cab),
                       tape.input(params.car),      tape.input(params.cbrown),
                       tape.input(params.cw),       tape.input(params.cm)};
  const LeafOpticsTaped out = prospect5_taped(tape, leaf, pc);
  LeafOptics optics;
  optics.reflectance.grid = tables.grid;
  optics.transmittance.grid = tables.grid;
  const auto r = out.reflectance.values();
  const auto t = out.transmittance.values();
  optics.reflectance.values.assign(r.begin(), r.end());
  optics.transmittance.values.assign(t.begin(), t.end());
  return optics;
}

}  // namespace ptv::prospect

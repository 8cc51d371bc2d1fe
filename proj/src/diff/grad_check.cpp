#include "ptv/diff/grad_check.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ptv/common/error.hpp"

namespace ptv::diff {

std::string GradCheckReport::summary() const {
  std::ostringstream out;
  out << (pass ? "PASS" : "FAIL") << " max_rel_err=" << max_rel_err
      << " checked=" << entries.size();
  for (const auto& e : entries) {
    if (!e.pass) {
      out << "\n  coord " << e.index << ": analytic=" << e.analytic
          << " numeric=" << e.numeric << " rel_err=" << e.rel_err;
    }
  }
  return out.str();
}

GradCheckReport grad_check(const ScalarFn& f, std::span<const double> x,
                           double step, double tol,
                           std::span<const std::size_t> indices, double floor) {
  if (!(step > 0.0)) throw DomainError("grad_check: step must be positive");

  Tape tape;
  std::vector<double> point(x.begin(), x.end());
  const Value out = f(tape, point);
  if (out.size() != 1) throw DomainError("grad_check: f must return a scalar");
  tape.backward(out);

  // Flatten leaf adjoints in registration order; the coordinate layout must
  // match x regardless of how the callable groups inputs into nodes.
  std::vector<double> analytic;
  analytic.reserve(x.size());
  for (const std::uint32_t id : tape.input_ids()) {
    const auto a = tape.adjoint(Value{&tape, id});
    analytic.insert(analytic.end(), a.begin(), a.end());
  }
  if (analytic.size() != x.size()) {
    throw DomainError("grad_check: callable registered " +
                      std::to_string(analytic.size()) +
                      " input coordinates, expected " + std::to_string(x.size()));
  }

  std::vector<std::size_t> all;
  if (indices.empty()) {
    all.resize(x.size());
    std::iota(all.begin(), all.end(), 0);
    indices = all;
  }

  auto eval = [&](std::span<const double> p) {
    Tape t;
    return f(t, p).scalar();
  };

  GradCheckReport report;
  for (const std::size_t i : indices) {
    const double h = step * std::max(1.0, std::fabs(point[i]));
    const double saved = point[i];
    point[i] = saved + h;
    const double fp = eval(point);
    point[i] = saved - h;
    const double fm = eval(point);
    point[i] = saved;
    const double numeric = (fp - fm) / (2.0 * h);
    const double denom = std::max({std::fabs(analytic[i]), std::fabs(numeric), floor});
    const double rel = std::fabs(analytic[i] - numeric) / denom;
    GradCheckEntry entry{i, analytic[i], numeric, rel, rel <= tol};
    report.max_rel_err = std::max(report.max_rel_err, rel);
    report.pass = report.pass && entry.pass;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace ptv::diff

#include "outstab/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "outstab/errors.hpp"

namespace outstab::dynsys {

GradientCheckReport gradient_check(const ScalarField& f, const std::vector<Vec>& points,
                                   double h) {
  if (!(h >= 1e-9 && h <= 1e-3)) throw std::invalid_argument("step outside [1e-9, 1e-3]");
  if (!f.has_gradient()) throw std::invalid_argument("field has no registered gradient");

  GradientCheckReport report;
  report.h = h;
  report.n_points = static_cast<int>(points.size());

  const auto n = static_cast<std::size_t>(f.dim);
  Vec plus(n), minus(n), grad(n);
  for (const auto& p : points) {
    if (p.size() != n) throw std::invalid_argument("point dimension mismatch");
    f.gradient(p, grad);
    double ana_norm = 0.0, diff_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      plus = p;
      minus = p;
      plus[i] += h;
      minus[i] -= h;
      double num = (f.value(plus) - f.value(minus)) / (2.0 * h);
      if (!std::isfinite(num) || !std::isfinite(grad[i]))
        throw NonFiniteValue("gradient check hit a non-finite value");
      ana_norm = std::max(ana_norm, std::abs(grad[i]));
      diff_norm = std::max(diff_norm, std::abs(num - grad[i]));
    }
    double rel = diff_norm / std::max(1.0, ana_norm);
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_point = p;
    }
  }
  return report;
}

}  // namespace outstab::dynsys

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace outstab::dynsys {

using Vec = std::vector<double>;

// Scalar function of the state with an optional analytic gradient.
struct ScalarField {
  int dim = 0;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;

  bool has_gradient() const { return static_cast<bool>(gradient); }

  double operator()(std::span<const double> x) const { return value(x); }

  Vec grad(std::span<const double> x) const {
    Vec g(static_cast<std::size_t>(dim));
    gradient(x, g);
    return g;
  }
};

struct GradientCheckReport {
  double max_rel_error = 0.0;
  Vec worst_point;
  int n_points = 0;
  double h = 0.0;
};

// Central-difference check of the registered gradient. The error at each
// point is ||g_num - g||_inf / max(1, ||g||_inf); the report keeps the worst.
GradientCheckReport gradient_check(const ScalarField& f, const std::vector<Vec>& points,
                                   double h = 1e-6);

}  // namespace outstab::dynsys

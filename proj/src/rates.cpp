#include "outstab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "outstab/errors.hpp"

namespace outstab::rates {

namespace {

// Min of fn over [lo, hi] sampled on an evenly spaced grid.
double sampled_min(const std::function<double(double)>& fn, double lo, double hi, int samples) {
  double m = fn(lo);
  for (int i = 1; i < samples; ++i) {
    double s = lo + (hi - lo) * i / (samples - 1);
    m = std::min(m, fn(s));
  }
  return m;
}

double floor_or_throw(const RateFunction& rho, double lo, double hi, int samples) {
  if (!(hi > lo)) throw DegenerateInterval("floor window is empty");
  double f = sampled_min([&](double s) { return rho(s); }, lo, hi, samples);
  if (f < 1e-12 && !rho.flags().tail_positive)
    throw TailVanishes("rate floor is numerically zero over the sampled window");
  return f;
}

double simpson(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double fa, double b,
                        double fb, double whole, double m, double fm, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, flm, m, fm);
  double right = simpson(m, fm, frm, b, fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson(a, fa, fm, b, fb);
  return adaptive_simpson(f, a, fa, b, fb, whole, m, fm, tol, 48);
}

}  // namespace

RateFunction::RateFunction(std::function<double(double)> eval, RateFlags flags,
                           std::function<double(double)> inverse)
    : eval_(std::move(eval)), inverse_(std::move(inverse)), flags_(flags) {
  if (!eval_) throw std::invalid_argument("rate function needs an evaluator");
}

double RateFunction::inverse(double v) const {
  if (inverse_) return inverse_(v);
  if (!flags_.class_k_inf)
    throw InverseUnavailable("no registered inverse and the function is not class K-infinity");
  if (v < 0.0) throw std::invalid_argument("inverse argument must be nonnegative");
  if (v == 0.0) return 0.0;
  double hi = 1.0;
  while (eval_(hi) < v) {
    hi *= 2.0;
    if (hi > 1e300) throw InverseUnavailable("could not bracket the inverse");
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    double mid = 0.5 * (lo + hi);
    (eval_(mid) < v ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RateFunction RateFunction::identity() {
  RateFlags fl{true, true, true, true, true};
  return RateFunction([](double s) { return s; }, fl, [](double v) { return v; });
}

RateFunction RateFunction::linear(double k) {
  if (!(k > 0.0)) throw std::invalid_argument("slope must be positive");
  RateFlags fl{true, true, true, true, true};
  return RateFunction([k](double s) { return k * s; }, fl,
                      [k](double v) { return v / k; });
}

RateFunction RateFunction::power(double coeff, double exponent) {
  if (!(coeff > 0.0) || !(exponent > 0.0))
    throw std::invalid_argument("power rate needs positive coefficient and exponent");
  RateFlags fl{true, true, true, true, true};
  return RateFunction([coeff, exponent](double s) { return coeff * std::pow(s, exponent); }, fl,
                      [coeff, exponent](double v) { return std::pow(v / coeff, 1.0 / exponent); });
}

RateFunction RateFunction::constant(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("constant rate must be nonnegative");
  RateFlags fl{};
  fl.nondecreasing = true;
  fl.tail_positive = c > 0.0;
  return RateFunction([c](double) { return c; }, fl);
}

RateFunction RateFunction::capped_identity(double cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("cap must be positive");
  RateFlags fl{};
  fl.positive_definite = true;
  fl.nondecreasing = true;
  fl.tail_positive = true;
  return RateFunction([cap](double s) { return std::min(s, cap); }, fl);
}

MonotoneEnvelope monotone_envelope(const RateFunction& rho, double s_max, int grid_points) {
  if (!(s_max > 0.0)) throw std::invalid_argument("s_max must be positive");
  if (grid_points < 2) throw std::invalid_argument("need at least two grid points");

  const double hi = 10.0 * s_max;
  std::vector<double> env(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) env[i] = rho(hi * i / (grid_points - 1));
  for (int i = grid_points - 2; i >= 0; --i) env[i] = std::min(env[i], env[i + 1]);

  MonotoneEnvelope out;
  out.vanishes = env.back() < 1e-12;
  out.window_lo = 0.0;
  out.window_hi = hi;
  out.grid_points = grid_points;

  RateFlags fl{};
  fl.nondecreasing = true;
  fl.tail_positive = !out.vanishes;
  fl.positive_definite = env[0] == 0.0 && env[1] > 0.0;
  auto nodes = std::make_shared<std::vector<double>>(std::move(env));
  double step = hi / (grid_points - 1);
  out.fn = RateFunction(
      [nodes, step, hi](double s) {
        if (s <= 0.0) return nodes->front();
        if (s >= hi) return nodes->back();
        double u = s / step;
        auto i = static_cast<std::size_t>(u);
        if (i + 1 >= nodes->size()) return nodes->back();
        double w = u - static_cast<double>(i);
        return (1.0 - w) * (*nodes)[i] + w * (*nodes)[i + 1];
      },
      fl);
  return out;
}

RateFunction smoothed_envelope(const RateFunction& rho_tilde, double quad_tol) {
  if (!(quad_tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  RateFlags in = rho_tilde.flags();
  RateFlags fl{};
  fl.nondecreasing = in.nondecreasing;
  fl.positive_definite = in.positive_definite && in.nondecreasing;
  fl.tail_positive = in.tail_positive;
  // The integrand is zero below 0, so the window is clipped there instead of
  // asking the quadrature to resolve the kink.
  return RateFunction(
      [rho_tilde, quad_tol](double s) {
        if (s <= 0.0) return 0.0;
        double lo = std::max(0.0, s - 1.0);
        return integrate([&rho_tilde](double u) { return rho_tilde(u); }, lo, s, quad_tol);
      },
      fl);
}

double rho_floor_case_i(const RateFunction& rho, const RateFunction& a, double r, double epsilon,
                        int samples) {
  if (!(r > 0.0) || !(epsilon > 0.0))
    throw std::invalid_argument("threshold and radius must be positive");
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  double m = std::min(r, a(epsilon));
  if (!(m > 0.0)) throw DegenerateInterval("lower edge of the floor window is not positive");
  return floor_or_throw(rho, m, m + std::max(100.0, 10.0 * m), samples);
}

double ball_max(const dynsys::ScalarField& f, double R, int density) {
  if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");
  if (density < 2) throw std::invalid_argument("grid density must be at least 2");
  if (f.dim < 1) throw std::invalid_argument("field dimension must be positive");

  const auto n = static_cast<std::size_t>(f.dim);
  auto scan = [&](const dynsys::Vec& center, double half_width, dynsys::Vec& best_point) {
    std::vector<int> idx(n, 0);
    dynsys::Vec p(n);
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
      double norm2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = center[i] - half_width + 2.0 * half_width * idx[i] / (density - 1);
        norm2 += p[i] * p[i];
      }
      if (norm2 <= R * R * (1.0 + 1e-12)) {
        double v = f(p);
        if (!std::isfinite(v)) throw NonFiniteValue("field value is not finite on the ball");
        if (v > best) {
          best = v;
          best_point = p;
        }
      }
      std::size_t k = 0;
      while (k < n && ++idx[k] == density) idx[k++] = 0;
      if (k == n) break;
    }
    return best;
  };

  dynsys::Vec center(n, 0.0), argmax(n, 0.0);
  double coarse = scan(center, R, argmax);
  double spacing = 2.0 * R / (density - 1);
  dynsys::Vec refined_point(n, 0.0);
  double fine = scan(argmax, spacing, refined_point);
  return std::max(coarse, fine);
}

namespace {

ConvergenceBound assemble(double epsilon, double R, double floor, double v_max, int density) {
  ConvergenceBound b;
  b.epsilon = epsilon;
  b.R = R;
  b.rho_floor = floor;
  b.v_max = v_max;
  b.T = (1.0 + v_max) / floor;
  b.grid_density = density;
  return b;
}

}  // namespace

ConvergenceBound convergence_time_case_i(const dynsys::ScalarField& V, const RateFunction& rho,
                                         const RateFunction& a, double r, double epsilon, double R,
                                         int density) {
  double floor = rho_floor_case_i(rho, a, r, epsilon);
  return assemble(epsilon, R, floor, ball_max(V, R, density), density);
}

ConvergenceBound convergence_time_case_ii(const dynsys::ScalarField& V,
                                          const dynsys::ScalarField& Q, const RateFunction& zeta,
                                          const RateFunction& rho, const RateFunction& a, double r,
                                          double epsilon, double R, int density) {
  if (!(r > 0.0) || !(epsilon > 0.0))
    throw std::invalid_argument("threshold and radius must be positive");
  double lo = std::min(r, a(epsilon));
  if (!(lo > 0.0)) throw DegenerateInterval("lower edge of the floor window is not positive");
  double hi = r + zeta(ball_max(Q, R, density));
  double floor = floor_or_throw(rho, lo, hi, 10001);
  return assemble(epsilon, R, floor, ball_max(V, R, density), density);
}

ConvergenceBound ios_time(const dynsys::ScalarField& V, const dynsys::ScalarField& W,
                          const RateFunction& rho, double epsilon, double R, int density) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  double w_max = ball_max(W, R, density);
  double floor = floor_or_throw(rho, epsilon, epsilon + w_max, 10001);
  return assemble(epsilon, R, floor, ball_max(V, R, density), density);
}

RateFunction ios_gain(const RateFunction& a, const RateFunction& chi) {
  if (!a.has_inverse() && !a.flags().class_k_inf)
    throw InverseUnavailable("lower comparison function cannot be inverted");
  RateFlags fl{};
  fl.positive_definite = a.flags().positive_definite && chi.flags().positive_definite;
  fl.nondecreasing = chi.flags().nondecreasing;
  fl.class_k = a.flags().class_k_inf && chi.flags().class_k;
  fl.class_k_inf = a.flags().class_k_inf && chi.flags().class_k_inf;
  fl.tail_positive = chi.flags().tail_positive;
  return RateFunction([a, chi](double s) { return a.inverse(chi(s)); }, fl);
}

}  // namespace outstab::rates

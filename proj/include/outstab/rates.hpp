#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "outstab/fields.hpp"

namespace outstab::rates {

struct RateFlags {
  bool positive_definite = false;  // rho(0) = 0, rho(s) > 0 for s > 0
  bool nondecreasing = false;
  bool tail_positive = false;      // liminf at infinity is positive
  bool class_k = false;            // continuous, strictly increasing, 0 at 0
  bool class_k_inf = false;        // class K and unbounded
};

// Comparison-function wrapper: a scalar map on [0, inf) with semantic flags
// and an optional inverse.
class RateFunction {
 public:
  RateFunction() = default;
  RateFunction(std::function<double(double)> eval, RateFlags flags,
               std::function<double(double)> inverse = nullptr);

  double operator()(double s) const { return eval_(s); }
  // Extension by zero to the negative axis, used by the smoothing integral.
  double eval_extended(double s) const { return s < 0.0 ? 0.0 : eval_(s); }

  const RateFlags& flags() const { return flags_; }
  bool has_inverse() const { return static_cast<bool>(inverse_); }

  // Registered inverse if present, otherwise bisection (needs class_k_inf).
  // Throws InverseUnavailable.
  double inverse(double v) const;

  static RateFunction identity();
  static RateFunction linear(double k);
  static RateFunction power(double coeff, double exponent);  // coeff * s^exponent
  static RateFunction constant(double c);
  static RateFunction capped_identity(double cap);           // min(s, cap)

 private:
  std::function<double(double)> eval_;
  std::function<double(double)> inverse_;
  RateFlags flags_;
};

struct MonotoneEnvelope {
  RateFunction fn;       // s -> inf of rho over [s, window_hi], nondecreasing
  bool vanishes = false; // envelope is numerically zero everywhere
  double window_lo = 0.0;
  double window_hi = 0.0;
  int grid_points = 0;
};

// Nondecreasing minorant of rho, computed by suffix minima over a dense grid
// on [0, 10 * s_max] and linear interpolation between nodes.
MonotoneEnvelope monotone_envelope(const RateFunction& rho, double s_max,
                                   int grid_points = 10001);

// Unit-window average of the zero-extended input: s -> integral of
// rho_tilde over [s-1, s]. Continuous, nondecreasing, below the input.
RateFunction smoothed_envelope(const RateFunction& rho_tilde, double quad_tol = 1e-8);

// Infimum of rho over [min(r, a(epsilon)), infinity), sampled on a documented
// window. Throws TailVanishes when the infimum is numerically zero and the
// tail_positive flag is absent.
double rho_floor_case_i(const RateFunction& rho, const RateFunction& a, double r,
                        double epsilon, int samples = 10001);

struct ConvergenceBound {
  double epsilon = 0.0;
  double R = 0.0;
  double rho_floor = 0.0;
  double v_max = 0.0;
  double T = 0.0;  // always (1 + v_max) / rho_floor
  int grid_density = 0;
};

// Max of a scalar field over the closed origin-centered ball of radius R:
// grid scan plus one refinement pass around the maximizer.
double ball_max(const dynsys::ScalarField& f, double R, int density);

ConvergenceBound convergence_time_case_i(const dynsys::ScalarField& V, const RateFunction& rho,
                                         const RateFunction& a, double r, double epsilon,
                                         double R, int density);

// Floor over [min(r, a(epsilon)), r + zeta(max Q on the R-ball)].
ConvergenceBound convergence_time_case_ii(const dynsys::ScalarField& V,
                                          const dynsys::ScalarField& Q,
                                          const RateFunction& zeta, const RateFunction& rho,
                                          const RateFunction& a, double r, double epsilon,
                                          double R, int density);

// Floor over [epsilon, epsilon + max W on the R-ball].
ConvergenceBound ios_time(const dynsys::ScalarField& V, const dynsys::ScalarField& W,
                          const RateFunction& rho, double epsilon, double R, int density);

// s -> a^{-1}(chi(s)). Throws InverseUnavailable when a cannot be inverted.
RateFunction ios_gain(const RateFunction& a, const RateFunction& chi);

}  // namespace outstab::rates

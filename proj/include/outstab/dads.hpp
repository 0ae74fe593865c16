#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "outstab/certkit.hpp"
#include "outstab/dynsys.hpp"

namespace outstab::dads {

// Gains of the deadzone-adaptive controller. phi is the plant nonlinearity
// multiplier; phi_is_one unlocks the closed-form threshold expressions.
struct DadsParams {
  double Gamma = 1.0;
  double eps_dz = 0.1;
  double c = 1.0;
  double a = 0.5;
  std::function<double(double)> phi;   // default: constant 1
  std::function<double(double)> dphi;  // derivative of phi
  bool phi_is_one = true;

  double phi_at(double y) const { return phi ? phi(y) : 1.0; }
  void validate() const;  // positive gains; throws std::invalid_argument
};

struct DadsScenario {
  double theta = 0.0;
  double y0 = 0.0;
  double z0 = 0.0;
  dynsys::DisturbanceSignal disturbance;  // scalar
  double horizon = 100.0;
};

struct ControlEval {
  double u = 0.0;
  bool z_saturated = false;  // exp(z) clamped at z = 700
};

ControlEval dads_control_ex(double y, double z, const DadsParams& p);
double dads_control(double y, double z, const DadsParams& p);

struct DadsDeriv {
  double ydot = 0.0;
  double zdot = 0.0;  // always >= 0
  bool z_saturated = false;
};

DadsDeriv dads_rhs(double y, double z, double d, double theta, const DadsParams& p);

// Closed loop on state (y, z) with output (|y| - sqrt(2 eps))^+ and the
// deadzone boundary registered as a kink surface.
dynsys::DynamicalSystem make_closed_loop(double theta, const DadsParams& p,
                                         const dynsys::DomainSpec& disturbances);
dynsys::DynamicalSystem make_closed_loop(double theta, const DadsParams& p, double d_max = 1.0);

// Certificate pair for the closed loop: V adds a rectified-mismatch term to
// the deadzone energy W. rho(s) = 2 c s, a(s) = s^4 / 8, Q = V, zeta = id.
// r_probe parameterizes the band above the deadzone where the small-W
// conditions are probed; the W-threshold stored in the bundle is r_probe^2/2.
certkit::CertificateBundle dads_certificates(const DadsParams& p, double theta,
                                             double r_probe = 1.0);

// Same certificates arranged for the disturbed loop: rho(s) = 2 c lambda s
// under the activation threshold chi(s) = a^2 s^4 / (2 c^2 (1-lambda)^2).
certkit::CertificateBundle dads_ios_bundle(const DadsParams& p, double theta,
                                           double lambda = 0.5);

struct ThetaThreshold {
  std::optional<double> closed_form;  // only when phi == 1
  double universal = 0.0;             // gain-only sufficient bound
  double numeric = 0.0;               // infimum of admissible theta on the probe interval
};

// Largest gain theta for which the deadzone energy is nonincreasing on the
// probe band [y_lo, y_hi] (disturbance-free loop).
ThetaThreshold theta_threshold_ugaos(const DadsParams& p, double y_lo, double y_hi,
                                     int samples = 20001);

// Disturbed-loop analogue on [sqrt(2 eps), y_hi], optimized over the lambda
// grid (each lambda in (0,1)).
ThetaThreshold theta_threshold_ios(const DadsParams& p, double y_hi,
                                   std::span<const double> lambda_grid, int samples = 20001);

struct DadsTolerances {
  double pios = 1e-6;        // slack on the decay-plus-gain bound
  double z_monotone = 1e-9;
  double gain = 1e-3;        // slack on the tail deadzone bound
  double regulation = 1e-2;
};

enum class RegulationCase { y_to_zero, z_saturated_below_ln, inconclusive };

struct DadsPropertyReport {
  bool pios_bound_ok = false;
  bool z_monotone_ok = false;
  bool z_bounded_ok = false;
  bool asymptotic_gain_ok = false;
  RegulationCase regulation_case = RegulationCase::inconclusive;
  double pios_margin = 0.0;       // min over samples of bound - |y|
  double z_min_increment = 0.0;
  double z_max = 0.0;
  double z_end = 0.0;
  double tail_half_y2_max = 0.0;
  double tail_abs_y_max = 0.0;
  double d_tail_max = 0.0;
  double other_branch_estimate = 0.0;  // gain-based tail bound from z_end
  bool z_saturated = false;
  double horizon = 0.0;
  double tail_start = 0.0;
};

// Simulates the scenario and checks the closed-loop guarantees:
// exponential-decay-plus-gain bound on |y|, monotone bounded z, tail inside
// the deadzone, and the vanishing-disturbance dichotomy. Throws
// HorizonTooShort when the tail window has fewer than 100 samples.
DadsPropertyReport dads_property_suite(const DadsScenario& scenario, const DadsParams& p,
                                       const DadsTolerances& tol = {},
                                       const dynsys::SimOptions& sim = {});

}  // namespace outstab::dads

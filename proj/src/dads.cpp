#include "outstab/dads.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "outstab/errors.hpp"

namespace outstab::dads {

namespace {

constexpr double kZCap = 700.0;  // exp stays finite below this

double exp_capped(double z) { return std::exp(std::min(z, kZCap)); }

double pos(double s) { return std::max(s, 0.0); }

}  // namespace

void DadsParams::validate() const {
  if (!(Gamma > 0.0) || !(c > 0.0) || !(a > 0.0))
    throw std::invalid_argument("adaptation and control gains must be positive");
  if (!(eps_dz >= 0.0)) throw std::invalid_argument("deadzone width must be nonnegative");
  if (phi_is_one && phi)
    throw std::invalid_argument("phi_is_one contradicts a custom phi");
}

ControlEval dads_control_ex(double y, double z, const DadsParams& p) {
  const double ph = p.phi_at(y);
  const double ez = exp_capped(z);
  ControlEval e;
  e.z_saturated = z > kZCap;
  e.u = -(p.c / 2.0) * y -
        ((1.0 + ez) / 2.0) * ((1.0 + ph * ph * y * y) / (2.0 * p.a) + p.c + ph * ph / p.c) * y;
  return e;
}

double dads_control(double y, double z, const DadsParams& p) {
  return dads_control_ex(y, z, p).u;
}

DadsDeriv dads_rhs(double y, double z, double d, double theta, const DadsParams& p) {
  ControlEval e = dads_control_ex(y, z, p);
  DadsDeriv out;
  out.z_saturated = e.z_saturated;
  out.ydot = theta * p.phi_at(y) * y + e.u + d;
  // The adaptation speed carries exp(-z); z only grows, so the cap on -z
  // matters just for extreme user-supplied z0.
  out.zdot = p.Gamma * std::exp(std::min(-z, kZCap)) * pos(0.5 * y * y - p.eps_dz);
  return out;
}

dynsys::DynamicalSystem make_closed_loop(double theta, const DadsParams& p,
                                         const dynsys::DomainSpec& disturbances) {
  p.validate();
  dynsys::DynamicalSystem sys;
  sys.dim_state = 2;
  sys.dim_disturbance = 1;
  sys.dim_output = 1;
  sys.disturbance_set = disturbances;
  sys.equilibrium_under_all_d = false;
  const double band = std::sqrt(2.0 * p.eps_dz);
  sys.field = [theta, p](std::span<const double> x, std::span<const double> d,
                         std::span<double> dx) {
    DadsDeriv dv = dads_rhs(x[0], x[1], d.empty() ? 0.0 : d[0], theta, p);
    dx[0] = dv.ydot;
    dx[1] = dv.zdot;
  };
  sys.output = [band](std::span<const double> x, std::span<double> y) {
    y[0] = pos(std::abs(x[0]) - band);
  };
  const double eps = p.eps_dz;
  sys.kink_surfaces.push_back(
      [eps](std::span<const double> x) { return 0.5 * x[0] * x[0] - eps; });
  return sys;
}

dynsys::DynamicalSystem make_closed_loop(double theta, const DadsParams& p, double d_max) {
  return make_closed_loop(theta, p, dynsys::DomainSpec::ball(1, d_max));
}

namespace {

// Deadzone energy in y and the rectified adaptation mismatch in z.
dynsys::ScalarField deadzone_energy(const DadsParams& p) {
  dynsys::ScalarField W;
  W.dim = 2;
  const double eps = p.eps_dz;
  W.value = [eps](std::span<const double> x) {
    double g = pos(0.5 * x[0] * x[0] - eps);
    return 0.5 * g * g;
  };
  W.gradient = [eps](std::span<const double> x, std::span<double> g) {
    g[0] = pos(0.5 * x[0] * x[0] - eps) * x[0];
    g[1] = 0.0;
  };
  return W;
}

dynsys::ScalarField energy_plus_mismatch(const DadsParams& p, double theta) {
  dynsys::ScalarField V;
  V.dim = 2;
  const double eps = p.eps_dz, a = p.a, Gamma = p.Gamma;
  const double level = std::abs(theta) - 1.0;
  V.value = [eps, a, Gamma, level](std::span<const double> x) {
    double g = pos(0.5 * x[0] * x[0] - eps);
    double m = pos(level - exp_capped(x[1]));
    return 0.5 * g * g + a / (3.0 * Gamma) * m * m * m;
  };
  V.gradient = [eps, a, Gamma, level](std::span<const double> x, std::span<double> g) {
    double ez = exp_capped(x[1]);
    double m = pos(level - ez);
    g[0] = pos(0.5 * x[0] * x[0] - eps) * x[0];
    g[1] = -(a / Gamma) * ez * m * m;
  };
  return V;
}

}  // namespace

certkit::CertificateBundle dads_certificates(const DadsParams& p, double theta, double r_probe) {
  p.validate();
  if (!(r_probe > 0.0)) throw std::invalid_argument("probe band must be positive");
  certkit::CertificateBundle b;
  b.V = energy_plus_mismatch(p, theta);
  b.W = deadzone_energy(p);
  b.Q = b.V;
  b.rho = rates::RateFunction::linear(2.0 * p.c);
  b.a = rates::RateFunction::power(1.0 / 8.0, 4.0);
  b.zeta = rates::RateFunction::identity();
  b.r = 0.5 * r_probe * r_probe;
  return b;
}

certkit::CertificateBundle dads_ios_bundle(const DadsParams& p, double theta, double lambda) {
  p.validate();
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("lambda must lie in (0, 1)");
  certkit::CertificateBundle b;
  b.V = energy_plus_mismatch(p, theta);
  b.W = deadzone_energy(p);
  b.rho = rates::RateFunction::linear(2.0 * p.c * lambda);
  b.a = rates::RateFunction::power(1.0 / 8.0, 4.0);
  double om = 1.0 - lambda;
  b.chi = rates::RateFunction::power(p.a * p.a / (2.0 * p.c * p.c * om * om), 4.0);
  return b;
}

namespace {

// Infimum over sampled y of bound(y) / weight(y), skipping points where the
// weight is numerically zero or negative (there the inequality does not
// constrain theta from above).
double numeric_threshold(const std::function<double(double)>& ratio,
                         const std::function<double(double)>& weight, double y_lo, double y_hi,
                         int samples) {
  double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double y = y_lo + (y_hi - y_lo) * i / (samples - 1);
    if (weight(y) <= 1e-12) continue;
    inf = std::min(inf, ratio(y));
  }
  return inf;
}

}  // namespace

ThetaThreshold theta_threshold_ugaos(const DadsParams& p, double y_lo, double y_hi,
                                     int samples) {
  p.validate();
  if (!(y_hi > y_lo) || !(y_lo >= 0.0)) throw std::invalid_argument("bad probe interval");
  if (samples < 2) throw std::invalid_argument("need at least two samples");

  ThetaThreshold th;
  const double c = p.c, a = p.a, eps = p.eps_dz;
  if (p.phi_is_one) th.closed_form = c + (1.0 + 2.0 * eps) / (4.0 * a) + 1.0 / (2.0 * c);
  th.universal =
      std::sqrt(2.0 + 2.0 * eps * c / a + 1.0 / (2.0 * a * c) + eps / (2.0 * a * a));
  th.numeric = numeric_threshold(
      [&](double y) {
        double ph = p.phi_at(y);
        return (c + (1.0 + ph * ph * y * y) / (4.0 * a) + ph * ph / (2.0 * c)) / ph;
      },
      [&](double y) { return p.phi_at(y); }, y_lo, y_hi, samples);
  return th;
}

ThetaThreshold theta_threshold_ios(const DadsParams& p, double y_hi,
                                   std::span<const double> lambda_grid, int samples) {
  p.validate();
  if (lambda_grid.empty()) throw std::invalid_argument("lambda grid is empty");
  for (double l : lambda_grid)
    if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  const double c = p.c, a = p.a, eps = p.eps_dz;
  const double y_lo = std::sqrt(2.0 * eps);
  if (!(y_hi > y_lo)) throw std::invalid_argument("probe interval ends inside the deadzone");
  if (samples < 2) throw std::invalid_argument("need at least two samples");

  ThetaThreshold th;
  if (p.phi_is_one) th.closed_form = c + 1.0 / (2.0 * c);
  th.universal = std::sqrt(1.0 + eps * c / a);
  th.numeric = -std::numeric_limits<double>::infinity();
  for (double lambda : lambda_grid) {
    double cand = numeric_threshold(
        [&](double y) {
          double ph = p.phi_at(y);
          double rhs = (1.0 + lambda) * c + (c * y * y + 2.0 * a) / (2.0 * a * c) * ph * ph;
          if (y > 0.0) rhs += 2.0 * c * (1.0 - lambda) * eps / (y * y);
          return rhs / (2.0 * ph);
        },
        [&](double y) { return p.phi_at(y); }, y_lo, y_hi, samples);
    th.numeric = std::max(th.numeric, cand);
  }
  return th;
}

DadsPropertyReport dads_property_suite(const DadsScenario& scenario, const DadsParams& p,
                                       const DadsTolerances& tol,
                                       const dynsys::SimOptions& sim) {
  p.validate();
  if (scenario.disturbance.dim() != 1)
    throw std::invalid_argument("scenario disturbance must be scalar");
  if (!(scenario.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

  double d_sup = scenario.disturbance.sup_norm();
  auto sys = make_closed_loop(scenario.theta, p,
                              dynsys::DomainSpec::ball(1, std::max(1.0, d_sup)));
  auto traj = dynsys::simulate(sys, {scenario.y0, scenario.z0}, scenario.disturbance,
                               scenario.horizon, sim);

  DadsPropertyReport rep;
  rep.horizon = scenario.horizon;
  rep.tail_start = 0.8 * scenario.horizon;

  const double gain = std::sqrt(2.0 * p.a / p.c);
  const double stray = gain * pos(std::abs(scenario.theta) - 1.0);
  rep.pios_margin = std::numeric_limits<double>::infinity();
  rep.z_min_increment = std::numeric_limits<double>::infinity();
  rep.z_max = -std::numeric_limits<double>::infinity();

  std::size_t tail_samples = 0;
  std::vector<double> dval(1);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const double y = traj.states[i][0], z = traj.states[i][1];
    double bound = std::abs(scenario.y0) * std::exp(-p.c * t / 2.0) + gain * d_sup + stray;
    rep.pios_margin = std::min(rep.pios_margin, bound - std::abs(y));
    if (i > 0)
      rep.z_min_increment = std::min(rep.z_min_increment, z - traj.states[i - 1][1]);
    rep.z_max = std::max(rep.z_max, z);
    if (t >= rep.tail_start) {
      ++tail_samples;
      rep.tail_half_y2_max = std::max(rep.tail_half_y2_max, 0.5 * y * y);
      rep.tail_abs_y_max = std::max(rep.tail_abs_y_max, std::abs(y));
      scenario.disturbance.eval(t, dval);
      rep.d_tail_max = std::max(rep.d_tail_max, std::abs(dval[0]));
    }
  }
  if (tail_samples < 100)
    throw HorizonTooShort("tail window holds fewer than 100 samples");

  rep.z_end = traj.states.back()[1];
  rep.z_saturated = rep.z_max > kZCap;
  rep.pios_bound_ok = rep.pios_margin >= -tol.pios;
  rep.z_monotone_ok = traj.size() < 2 || rep.z_min_increment >= -tol.z_monotone;
  if (traj.size() < 2) rep.z_min_increment = 0.0;
  rep.z_bounded_ok = std::isfinite(rep.z_max) && !rep.z_saturated;
  rep.asymptotic_gain_ok = rep.tail_half_y2_max <= p.eps_dz + tol.gain;
  rep.other_branch_estimate =
      (p.a / p.c) *
      std::pow(rep.d_tail_max + pos(std::abs(scenario.theta) - 1.0 - exp_capped(rep.z_end)), 2.0);

  if (scenario.disturbance.kind() == dynsys::SignalKind::decaying) {
    double ln_gap = std::abs(scenario.theta) > 1.0
                        ? std::log(std::abs(scenario.theta) - 1.0)
                        : -std::numeric_limits<double>::infinity();
    if (rep.tail_abs_y_max <= tol.regulation)
      rep.regulation_case = RegulationCase::y_to_zero;
    else if (std::abs(scenario.theta) > 1.0 && rep.z_max < ln_gap - tol.regulation)
      rep.regulation_case = RegulationCase::z_saturated_below_ln;
    else
      rep.regulation_case = RegulationCase::inconclusive;
  }
  return rep;
}

}  // namespace outstab::dads

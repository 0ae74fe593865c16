#include "outstab/dynsys.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace outstab::dynsys {

namespace {

double inf_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string at_time(const char* what, double t) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s at t = %.6g", what, t);
  return buf;
}

// Dormand-Prince 5(4) tableau. The last stage is evaluated at the step end
// with the fifth-order solution (FSAL).
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA2[1] = {1.0 / 5};
constexpr double kA3[2] = {3.0 / 40, 9.0 / 40};
constexpr double kA4[3] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
constexpr double kA5[4] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
constexpr double kA6[5] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                           -5103.0 / 18656};
constexpr double kB5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
                           11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace

void DynamicalSystem::validate() const {
  if (dim_state <= 0) throw std::invalid_argument("state dimension must be positive");
  if (dim_output <= 0) throw std::invalid_argument("output dimension must be positive");
  Vec origin(static_cast<std::size_t>(dim_state), 0.0);
  Vec y = out(origin);
  for (double v : y)
    if (std::abs(v) > 1e-12) throw std::invalid_argument("output does not vanish at the origin");
  auto check_zero_field = [&](const Vec& d) {
    Vec dx = rhs(origin, d);
    for (double v : dx)
      if (std::abs(v) > 1e-12)
        throw std::invalid_argument("origin is not an equilibrium for a sampled disturbance");
  };
  check_zero_field(Vec(static_cast<std::size_t>(dim_disturbance), 0.0));
  if (equilibrium_under_all_d && dim_disturbance > 0) {
    for (const auto& d : disturbance_set.grid(5)) check_zero_field(d);
  }
}

double Trajectory::output_norm(std::size_t i) const {
  double s = 0.0;
  for (double v : outputs[i]) s += v * v;
  return std::sqrt(s);
}

Trajectory simulate(const DynamicalSystem& sys, const Vec& x0, const DisturbanceSignal& d,
                    double horizon, const SimOptions& opt) {
  if (static_cast<int>(x0.size()) != sys.dim_state)
    throw std::invalid_argument("initial state dimension mismatch");
  if (d.dim() != sys.dim_disturbance)
    throw std::invalid_argument("signal dimension mismatch");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon must be positive and finite");
  if (!(opt.tol >= 1e-12 && opt.tol <= 1e-2))
    throw std::invalid_argument("tolerance outside [1e-12, 1e-2]");

  const auto n = static_cast<std::size_t>(sys.dim_state);
  const auto m = static_cast<std::size_t>(sys.dim_disturbance);
  const double max_step = opt.max_step > 0.0 ? opt.max_step : horizon / 1000.0;

  // Accepted steps never straddle a switch time of the signal.
  std::vector<double> stops;
  for (double b : d.breakpoints())
    if (b > 0.0 && b < horizon) stops.push_back(b);
  stops.push_back(horizon);

  Vec x = x0;
  double t = 0.0;
  std::size_t stop_idx = 0;

  Vec k[7];
  for (auto& ki : k) ki.resize(n);
  Vec xs(n), x5(n), dbuf(m);

  // left=true keeps stage evaluations at a switch time on the segment being
  // integrated; the new segment starts with the next step.
  auto field_at = [&](double tt, const Vec& xx, Vec& out, bool left) {
    d.eval(tt, dbuf, left);
    sys.field(xx, dbuf, out);
    if (!all_finite(out)) throw StateBlowup(at_time("field produced a non-finite value", tt));
  };

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  traj.outputs.push_back(sys.out(x));

  field_at(0.0, x, k[0], false);

  double deriv_scale = 1.0 + inf_norm(k[0]);
  double h = std::min({max_step, horizon / 100.0, 0.01 * (1.0 + inf_norm(x)) / deriv_scale});
  bool fsal_valid = true;

  while (t < horizon) {
    double t_stop = stops[stop_idx];
    const double h_min = 1e-14 * std::max(1.0, std::abs(t));

    double h_cap = std::min(max_step, t_stop - t);
    bool near_kink = false;
    for (const auto& g : sys.kink_surfaces)
      if (std::abs(g(x)) < opt.kink_tol) near_kink = true;
    if (near_kink) h_cap = std::min(h_cap, opt.kink_step_cap);
    double h_try = std::clamp(h, h_min, h_cap);

    if (!fsal_valid) {
      field_at(t, x, k[0], false);
      fsal_valid = true;
    }

    while (true) {
      bool ends_at_stop = t + h_try >= t_stop - 1e-14 * std::max(1.0, t_stop);
      if (ends_at_stop) h_try = t_stop - t;

      auto stage = [&](int s, const double* a) {
        for (std::size_t i = 0; i < n; ++i) {
          double acc = 0.0;
          for (int j = 0; j < s - 1; ++j) acc += a[j] * k[j][i];
          xs[i] = x[i] + h_try * acc;
        }
        double ts = t + kC[s - 1] * h_try;
        bool left = ends_at_stop && kC[s - 1] == 1.0;
        field_at(ts, xs, k[s - 1], left);
      };
      stage(2, kA2);
      stage(3, kA3);
      stage(4, kA4);
      stage(5, kA5);
      stage(6, kA6);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 6; ++j) acc += kB5[j] * k[j][i];
        x5[i] = x[i] + h_try * acc;
      }
      field_at(t + h_try, x5, k[6], ends_at_stop);

      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double e = 0.0;
        for (int j = 0; j < 7; ++j) e += (kB5[j] - kB4[j]) * k[j][i];
        err = std::max(err, std::abs(h_try * e));
      }

      double budget = opt.tol * h_try;
      if (err <= budget || h_try <= h_min * (1.0 + 1e-3)) {
        double t_new = ends_at_stop ? t_stop : t + h_try;
        traj.step_stats.accepted++;
        traj.step_stats.min_step = std::min(traj.step_stats.min_step, h_try);
        traj.step_stats.max_error_rate =
            std::max(traj.step_stats.max_error_rate, err / h_try);
        if (near_kink && h_try >= opt.kink_step_cap * (1.0 - 1e-9))
          traj.step_stats.kink_capped++;

        x.swap(x5);
        t = t_new;
        if (inf_norm(x) > opt.blowup_guard)
          throw StateBlowup(at_time("state norm exceeded the blowup guard", t));

        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.outputs.push_back(sys.out(x));

        k[0] = k[6];
        if (ends_at_stop) {
          fsal_valid = false;  // the next segment may start with a different d
          if (stop_idx + 1 < stops.size()) ++stop_idx;
        }

        double grow = err > 0.0 ? 0.9 * std::pow(budget / err, 0.25) : 5.0;
        h = h_try * std::clamp(grow, 0.2, 5.0);
        break;
      }

      traj.step_stats.rejected++;
      double shrink = 0.9 * std::pow(budget / err, 0.25);
      h_try *= std::clamp(shrink, 0.1, 0.9);
      if (h_try < h_min)
        throw StepUnderflow(at_time("step size underflow", t));
    }
  }
  return traj;
}

Trajectory simulate_fixed(const DynamicalSystem& sys, const Vec& x0, const DisturbanceSignal& d,
                          double horizon, int n_steps, double blowup_guard) {
  if (static_cast<int>(x0.size()) != sys.dim_state)
    throw std::invalid_argument("initial state dimension mismatch");
  if (n_steps < 1) throw std::invalid_argument("need at least one step");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

  const auto n = static_cast<std::size_t>(sys.dim_state);
  const auto m = static_cast<std::size_t>(sys.dim_disturbance);
  const double h = horizon / n_steps;

  Vec x = x0, k1(n), k2(n), k3(n), k4(n), xs(n), dbuf(m);
  auto field_at = [&](double tt, const Vec& xx, Vec& out) {
    d.eval(tt, dbuf);
    sys.field(xx, dbuf, out);
    if (!all_finite(out)) throw StateBlowup(at_time("field produced a non-finite value", tt));
  };

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  traj.outputs.push_back(sys.out(x));
  traj.step_stats.min_step = h;

  for (int s = 0; s < n_steps; ++s) {
    double t = horizon * s / n_steps;
    field_at(t, x, k1);
    for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + 0.5 * h * k1[i];
    field_at(t + 0.5 * h, xs, k2);
    for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + 0.5 * h * k2[i];
    field_at(t + 0.5 * h, xs, k3);
    for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + h * k3[i];
    field_at(t + h, xs, k4);
    for (std::size_t i = 0; i < n; ++i)
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    double t_new = horizon * (s + 1) / n_steps;
    if (inf_norm(x) > blowup_guard)
      throw StateBlowup(at_time("state norm exceeded the blowup guard", t_new));
    traj.step_stats.accepted++;
    traj.times.push_back(t_new);
    traj.states.push_back(x);
    traj.outputs.push_back(sys.out(x));
  }
  return traj;
}

}  // namespace outstab::dynsys

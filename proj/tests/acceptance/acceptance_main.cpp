// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances and budgets are pinned here on purpose; loosening them
// is a contract change, not a tuning knob.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "outstab/builtin.hpp"
#include "outstab/certkit.hpp"
#include "outstab/dads.hpp"
#include "outstab/dynsys.hpp"
#include "outstab/probes.hpp"
#include "outstab/rates.hpp"

using namespace outstab;
using dynsys::Vec;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void report(int idx, bool ok, const std::string& label, double secs) {
  std::printf("[%s] %d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", idx, label.c_str(),
              secs);
  if (!ok) ++failures;
}

// ---------------------------------------------------------------------------
// 1. Grid certification of the planar benchmark: at least 1e4 state points,
//    zero violations at slack 1e-9, under 10 s.
void criterion1() {
  Timer t;
  auto sys = builtin::example1(1.0);
  auto bundle = builtin::example1_bundle();
  certkit::DomainSample sample;
  sample.box_lo = {-5.0, -5.0};
  sample.box_hi = {5.0, 5.0};
  sample.density = {101, 101};
  sample.disturbance_samples = sys.disturbance_set.grid(21);
  sample.slack_abs = 1e-9;
  auto v = certkit::certify(sys, bundle, certkit::TheoremId::THM3_IOS, sample);
  bool ok = v.passed && v.violations.empty() &&
            sample.state_count() >= 10000 && t.secs() < 10.0;
  char label[160];
  std::snprintf(label, sizeof label,
                "output-stability certificate, %zu grid points, %zu violations",
                sample.state_count(), v.violations.size());
  report(1, ok, label, t.secs());
}

// ---------------------------------------------------------------------------
// 2. Constant disturbances d in {0.1, 0.5, 1}: over 20 sampled initial states
//    with |x0| <= 5, the trailing 20% of horizon 50 obeys
//    |x2| <= 2 sqrt(2) d + 1e-3. Under 30 s.
// 3. Along every criterion-2 trajectory and for all grid pairs tau <= t,
//    W(t) <= max(W(tau), chi(d)) + 1e-5, checked with one running extremum.
void criterion2_3() {
  Timer t;
  auto sys = builtin::example1(1.0);
  auto ball = dynsys::DomainSpec::ball(2, 5.0);
  std::mt19937_64 rng(0);
  std::vector<Vec> inits;
  for (int i = 0; i < 20; ++i) inits.push_back(ball.sample(rng));

  const double horizon = 50.0;
  const double tail_from = 0.8 * horizon;
  bool ok2 = true, ok3 = true;
  double worst_gap2 = -1e300;  // tail |x2| minus its bound, max over runs
  for (double d : {0.1, 0.5, 1.0}) {
    const double bound = 2.0 * std::sqrt(2.0) * d + 1e-3;
    const double chi = 8.0 * d * d;
    for (const auto& x0 : inits) {
      auto traj = dynsys::simulate(sys, x0,
                                   dynsys::DisturbanceSignal::constant({d}),
                                   horizon);
      double tail_max = 0.0;
      double w_running_min = 1e300;
      for (std::size_t i = 0; i < traj.size(); ++i) {
        const double x2 = traj.states[i][1];
        if (traj.times[i] >= tail_from) tail_max = std::max(tail_max, std::abs(x2));
        const double w = x2 * x2;
        if (w > std::max(w_running_min, chi) + 1e-5) ok3 = false;
        w_running_min = std::min(w_running_min, w);
      }
      worst_gap2 = std::max(worst_gap2, tail_max - bound);
      if (tail_max > bound) ok2 = false;
    }
  }
  double secs = t.secs();
  ok2 = ok2 && secs < 30.0;
  char label2[160];
  std::snprintf(label2, sizeof label2,
                "constant-disturbance tails inside the gain bound "
                "(worst slack %.4f)",
                -worst_gap2);
  report(2, ok2, label2, secs);
  report(3, ok3,
         "deadzone energy never climbs above its running floor plus chi", 0.0);
}

// ---------------------------------------------------------------------------
// 4. Adaptive loop, no disturbance, gains (1, 0.1, 1, 0.5), theta = 2:
//    50 initial states with |(y0, z0)| <= 3 settle into |y~| <= 0.05 and the
//    empirical uniform attainment time stays below the certified bound.
void criterion4() {
  Timer t;
  dads::DadsParams p;
  p.Gamma = 1.0;
  p.eps_dz = 0.1;
  p.c = 1.0;
  p.a = 0.5;
  const double theta = 2.0;
  auto sys = dads::make_closed_loop(theta, p, dynsys::DomainSpec::ball(1, 1.0));
  auto bundle = dads::dads_certificates(p, theta, 1.0);
  auto cb = rates::convergence_time_case_ii(bundle.V, *bundle.Q, *bundle.zeta,
                                            bundle.rho, bundle.a, bundle.r,
                                            0.05, 3.0, 61);
  probes::ProbeOptions opt;
  opt.seed = 0;
  opt.theory_T = cb.T;
  auto rep = probes::uniformity_probe(
      sys, 3.0, 0.05, 50, {dynsys::DisturbanceSignal::zero(1)}, 50.0, opt);
  bool ok = rep.not_attained == 0 && rep.within_theory &&
            rep.sup_attainment <= cb.T;
  char label[160];
  std::snprintf(label, sizeof label,
                "undisturbed adaptation attains in %.2f s of model time "
                "(certified %.3g)",
                rep.sup_attainment, cb.T);
  report(4, ok, label, t.secs());
}

// ---------------------------------------------------------------------------
// 5. 100 seeded scenarios (theta in [-2, 2]; zero, constant, sinusoidal and
//    decaying disturbances; |y0| <= 5, z0 = 0, horizon 200): monotone z at
//    tolerance 1e-9, decay-plus-gain bound at slack 1e-6, tail deadzone bound
//    at slack 1e-3. All 100, under 2 minutes.
void criterion5() {
  Timer t;
  dads::DadsParams p;
  dads::DadsTolerances tol;
  tol.pios = 1e-6;
  tol.z_monotone = 1e-9;
  tol.gain = 1e-3;
  int pass = 0;
  for (int k = 0; k < 100; ++k) {
    std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(k));
    std::uniform_real_distribution<double> utheta(-2.0, 2.0), uy(-5.0, 5.0);
    dads::DadsScenario sc;
    sc.theta = utheta(rng);
    sc.y0 = uy(rng);
    sc.z0 = 0.0;
    sc.horizon = 200.0;
    switch (k % 4) {
      case 0: sc.disturbance = dynsys::DisturbanceSignal::zero(1); break;
      case 1: sc.disturbance = dynsys::DisturbanceSignal::constant({0.5}); break;
      case 2:
        sc.disturbance = dynsys::DisturbanceSignal::sinusoid({0.5}, 1.0, 0.0);
        break;
      default:
        sc.disturbance = dynsys::DisturbanceSignal::decaying({1.0}, 0.2);
        break;
    }
    auto rep = dads::dads_property_suite(sc, p, tol);
    if (rep.z_monotone_ok && rep.pios_bound_ok && rep.asymptotic_gain_ok) ++pass;
  }
  double secs = t.secs();
  bool ok = pass == 100 && secs < 120.0;
  char label[160];
  std::snprintf(label, sizeof label,
                "scenario sweep: %d/100 satisfy monotone adaptation, the decay "
                "bound and the tail deadzone",
                pass);
  report(5, ok, label, secs);
}

// ---------------------------------------------------------------------------
// 6. Deadzone inertness: starting with y0^2 / 2 <= eps and d = 0, the
//    adaptation state never moves, bit for bit.
void criterion6() {
  Timer t;
  dads::DadsParams p;
  bool ok = true;
  for (double theta : {0.3, 1.7})
    for (double y0 : {0.0, 0.44, -0.4})
      for (double z0 : {0.0, -1.5, 2.0}) {
        auto sys = dads::make_closed_loop(theta, p, dynsys::DomainSpec::ball(1, 1.0));
        auto traj = dynsys::simulate(sys, {y0, z0},
                                     dynsys::DisturbanceSignal::zero(1), 20.0);
        for (const auto& x : traj.states)
          if (x[1] != z0) ok = false;
      }
  report(6, ok, "the adaptation state is exactly inert inside the deadzone",
         t.secs());
}

// ---------------------------------------------------------------------------
// 7. Integral-regularity probe: exponential decay is certified convergent and
//    regular; a spike train with shrinking bumps keeps a bounded integral,
//    fails the increment check with a witness, and keeps tail sup 1.
void criterion7() {
  Timer t;
  auto decay = probes::sample_function([](double s) { return std::exp(-s); },
                                       0.0, 25.0, 5001);
  auto repA = probes::barbalat_probe(decay, rates::RateFunction::identity());
  bool okA = repA.quc && std::abs(repA.integral - 1.0) <= 1e-3 &&
             repA.tail_sup < 1e-2 && repA.consistent;

  auto spikes = probes::spike_train(19, 20.0);
  auto repB = probes::barbalat_probe(spikes, rates::RateFunction::identity());
  probes::BarbalatOptions defaults;
  auto quc = probes::quc_check(spikes, defaults.eps_list, defaults.delta_grid);
  bool okB = repB.integral < 1.01 && !quc.quc && quc.witness.has_value() &&
             repB.tail_sup == 1.0 && repB.consistent;
  report(7, okA && okB,
         "regularity probe separates exponential decay from a spike train",
         t.secs());
}

// ---------------------------------------------------------------------------
// 8. Envelopes: the nondecreasing minorant and the unit-window smoothing
//    reproduce their ramp/constant closed forms to 1e-8 on 1000-point grids;
//    the minorant is idempotent and the smoothing stays below its input.
void criterion8() {
  Timer t;
  bool ok = true;

  auto env_id = rates::monotone_envelope(rates::RateFunction::identity(), 3.0);
  auto env_cap = rates::monotone_envelope(rates::RateFunction::capped_identity(1.0), 3.0);
  auto env_again = rates::monotone_envelope(env_cap.fn, 3.0);
  const double step = env_cap.window_hi / (env_cap.grid_points - 1);
  for (int j = 0; j < 1000; ++j) {
    const double s_free = 3.0 * j / 999.0;
    const double s_node = j * step;
    if (std::abs(env_id.fn(s_free) - s_free) > 1e-8) ok = false;
    if (std::abs(env_cap.fn(s_node) - std::min(s_node, 1.0)) > 1e-8) ok = false;
    if (std::abs(env_again.fn(s_node) - env_cap.fn(s_node)) > 1e-12) ok = false;
  }

  auto ramp = rates::smoothed_envelope(rates::RateFunction::identity());
  auto flat = rates::smoothed_envelope(rates::RateFunction::constant(2.0));
  for (int j = 0; j < 1000; ++j) {
    const double s = 3.0 * j / 999.0;
    const double ramp_closed = s < 1.0 ? 0.5 * s * s : s - 0.5;
    if (std::abs(ramp(s) - ramp_closed) > 1e-8) ok = false;
    if (std::abs(flat(s) - 2.0 * std::min(s, 1.0)) > 1e-8) ok = false;
    if (ramp(s) > s + 1e-12) ok = false;  // smoothing below its input
  }
  report(8, ok, "rate envelopes match their closed forms and invariants",
         t.secs());
}

// ---------------------------------------------------------------------------
// 9. Gradient and integrator hygiene: analytic gradients agree with central
//    differences to 1e-5 at 100 random points; halving the fixed step shrinks
//    the error against the exponential closed form by at least 12x.
void criterion9() {
  Timer t;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<Vec> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({u(rng), u(rng)});

  bool ok = true;
  auto b1 = builtin::example1_bundle();
  dads::DadsParams p;
  auto b2 = dads::dads_certificates(p, 2.0, 1.0);
  for (const auto* f : {&b1.V, &b1.W, &b2.V, &b2.W})
    if (dynsys::gradient_check(*f, pts).max_rel_error > 1e-5) ok = false;

  auto sys = builtin::example1();
  auto err = [&](int n) {
    auto tr = dynsys::simulate_fixed(sys, {0.0, 1.0},
                                     dynsys::DisturbanceSignal::zero(1), 1.0, n);
    return std::abs(tr.states.back()[1] - std::exp(-1.0));
  };
  if (err(50) / err(100) < 12.0) ok = false;
  report(9, ok, "gradients match central differences; step halving pays off",
         t.secs());
}

}  // namespace

int main() {
  criterion1();
  criterion2_3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}

#include "outstab/probes.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "outstab/errors.hpp"
#include "outstab/parallel.hpp"

namespace outstab::probes {

namespace {

// splitmix64 finalizer; keys trial generators so results are independent of
// scheduling and job count.
std::uint64_t mix_key(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + (trial + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& v, std::size_t from,
                 std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from + 1; i <= to; ++i)
    s += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
  return s;
}

}  // namespace

void SampledSignal::validate() const {
  if (times.empty()) throw std::invalid_argument("signal has no samples");
  if (times.size() != values.size())
    throw std::invalid_argument("times and values lengths disagree");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
      throw std::invalid_argument("signal contains a non-finite entry");
    if (i > 0 && times[i] - times[i - 1] < 1e-9)
      throw std::invalid_argument("time grid must increase by at least 1e-9");
  }
}

SampledSignal sample_function(const std::function<double(double)>& f, double t0, double t1,
                              int n) {
  if (n < 2) throw std::invalid_argument("need at least two samples");
  if (!(t1 > t0)) throw std::invalid_argument("time window is empty");
  SampledSignal s;
  s.times.reserve(n);
  s.values.reserve(n);
  for (int i = 0; i < n; ++i) {
    double t = t0 + (t1 - t0) * i / (n - 1);
    s.times.push_back(t);
    s.values.push_back(f(t));
  }
  s.validate();
  return s;
}

SampledSignal spike_train(int n_bumps, double horizon, int points_per_side, double base_dt) {
  if (n_bumps < 1) throw std::invalid_argument("need at least one bump");
  if (!(horizon >= n_bumps + 1.0))
    throw std::invalid_argument("horizon must leave room past the last bump");
  if (points_per_side < 1 || !(base_dt > 0.0))
    throw std::invalid_argument("bad grid parameters");
  if (std::ldexp(1.0, -(n_bumps + 1)) / points_per_side < 1e-9)
    throw std::invalid_argument("narrowest bump falls below the grid resolution");

  std::set<double> grid;
  for (int n = 1; n <= n_bumps; ++n) {
    double w = std::ldexp(1.0, -(n + 1));
    for (int k = 0; k <= 2 * points_per_side; ++k)
      grid.insert(n - w + 2.0 * w * k / (2 * points_per_side));
  }
  // The uniform backbone yields to bump nodes: accumulated multiples of
  // base_dt can land a hair before an exact base or apex time, and the
  // dedup below must never be the one to drop those.
  auto clear_of_bumps = [&](double t) {
    auto it = grid.lower_bound(t - 1e-9);
    return it == grid.end() || *it > t + 1e-9;
  };
  std::vector<double> backbone;
  for (double t = 0.0; t < horizon; t += base_dt) backbone.push_back(t);
  backbone.push_back(horizon);
  for (double t : backbone)
    if (clear_of_bumps(t)) grid.insert(t);

  auto height = [&](double t) {
    double v = 0.0;
    for (int n = 1; n <= n_bumps; ++n) {
      double w = std::ldexp(1.0, -(n + 1));
      v = std::max(v, 1.0 - std::abs(t - n) / w);
    }
    return std::max(v, 0.0);
  };

  SampledSignal s;
  double last = -1.0;
  for (double t : grid) {
    if (!s.times.empty() && t - last < 1e-9) continue;
    s.times.push_back(t);
    s.values.push_back(height(t));
    last = t;
  }
  s.validate();
  return s;
}

std::optional<double> attainment_time(const dynsys::Trajectory& traj, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (traj.size() == 0) throw std::invalid_argument("empty trajectory");
  std::size_t last_exceed = traj.size();  // sentinel: never exceeded
  for (std::size_t i = 0; i < traj.size(); ++i)
    if (traj.output_norm(i) > epsilon) last_exceed = i;
  if (last_exceed == traj.size()) return 0.0;
  if (last_exceed + 1 == traj.size()) return std::nullopt;
  return traj.times[last_exceed + 1];
}

UniformityReport uniformity_probe(const dynsys::DynamicalSystem& sys, double R, double epsilon,
                                  int n_init,
                                  const std::vector<dynsys::DisturbanceSignal>& signals,
                                  double horizon, const ProbeOptions& opt) {
  if (n_init < 1) throw std::invalid_argument("need at least one initial state");
  if (signals.empty()) throw std::invalid_argument("need at least one signal");
  if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");

  auto ball = dynsys::DomainSpec::ball(sys.dim_state, R);
  std::mt19937_64 rng(opt.seed);
  std::vector<Vec> inits(static_cast<std::size_t>(n_init));
  for (auto& x : inits) x = ball.sample(rng);

  struct Stat {
    double attainment = -1.0;
    double overshoot = 0.0;
    double tail_max = 0.0;
  };
  const std::size_t total = signals.size() * inits.size();
  std::vector<Stat> stats(total);
  const double tail_start = (1.0 - opt.tail_fraction) * horizon;

  dynsys::SimOptions sim;
  sim.tol = opt.tol;
  parallel_for(
      total,
      [&](std::size_t idx) {
        const auto& sig = signals[idx / inits.size()];
        const auto& x0 = inits[idx % inits.size()];
        auto traj = dynsys::simulate(sys, x0, sig, horizon, sim);
        Stat st;
        auto att = attainment_time(traj, epsilon);
        st.attainment = att.has_value() ? *att : -1.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
          double yn = traj.output_norm(i);
          st.overshoot = std::max(st.overshoot, yn);
          if (traj.times[i] >= tail_start) st.tail_max = std::max(st.tail_max, yn);
        }
        stats[idx] = st;
      },
      opt.jobs);

  UniformityReport rep;
  rep.n_trajectories = static_cast<int>(total);
  rep.R = R;
  rep.epsilon = epsilon;
  rep.horizon = horizon;
  rep.theory_T = opt.theory_T;
  for (const auto& st : stats) {
    rep.attainment_times.push_back(st.attainment);
    if (st.attainment < 0.0)
      rep.not_attained++;
    else
      rep.sup_attainment = std::max(rep.sup_attainment, st.attainment);
    rep.max_overshoot = std::max(rep.max_overshoot, st.overshoot);
    rep.tail_max = std::max(rep.tail_max, st.tail_max);
  }
  if (rep.not_attained > 0)
    rep.within_theory = false;
  else if (rep.theory_T.has_value())
    rep.within_theory = rep.sup_attainment <= *rep.theory_T;
  return rep;
}

namespace {

// First sampled pair (i < j, t_j - t_i <= delta) whose increment reaches eps.
// Sliding-window minimum: the deque keeps candidate i's with increasing phi.
std::optional<QucWitness> find_violating_pair(const SampledSignal& phi, double eps,
                                              double delta) {
  std::deque<std::size_t> dq;
  std::size_t lo = 0;
  for (std::size_t j = 1; j < phi.size(); ++j) {
    while (!dq.empty() && phi.values[dq.back()] > phi.values[j - 1]) dq.pop_back();
    dq.push_back(j - 1);
    while (lo < j && phi.times[j] - phi.times[lo] > delta) {
      if (!dq.empty() && dq.front() == lo) dq.pop_front();
      ++lo;
    }
    if (dq.empty()) continue;
    std::size_t i = dq.front();
    if (phi.values[j] - phi.values[i] >= eps) {
      QucWitness w;
      w.t0 = phi.times[i];
      w.t1 = phi.times[j];
      w.increment = phi.values[j] - phi.values[i];
      w.eps = eps;
      w.delta = delta;
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace

QucReport quc_check(const SampledSignal& phi, std::span<const double> eps_list,
                    std::span<const double> delta_grid) {
  phi.validate();
  if (eps_list.empty() || delta_grid.empty())
    throw std::invalid_argument("eps list and delta grid must be nonempty");
  for (double e : eps_list)
    if (!(e > 0.0)) throw std::invalid_argument("eps values must be positive");
  std::vector<double> deltas(delta_grid.begin(), delta_grid.end());
  for (double d : deltas)
    if (!(d > 0.0)) throw std::invalid_argument("delta values must be positive");
  std::sort(deltas.begin(), deltas.end());

  QucReport rep;
  for (double eps : eps_list) {
    QucPerEps pe;
    pe.eps = eps;
    for (auto it = deltas.rbegin(); it != deltas.rend(); ++it) {
      if (!find_violating_pair(phi, eps, *it)) {
        pe.holds = true;
        pe.best_delta = *it;
        break;
      }
    }
    if (!pe.holds) pe.witness = find_violating_pair(phi, eps, deltas.front());
    rep.per_eps.push_back(pe);
    if (!pe.holds && rep.quc) {
      rep.quc = false;
      rep.witness = pe.witness;
    }
  }
  return rep;
}

QucSufficientReport quc_sufficient(const SampledSignal& phi, double M, std::optional<double> N) {
  phi.validate();
  if (!std::isfinite(M)) throw std::invalid_argument("drift bound must be finite");
  QucSufficientReport rep;
  rep.shifted_nonincreasing = true;
  rep.quotient_bounded = true;
  if (N.has_value()) rep.capped_premise = true;
  rep.max_quotient = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < phi.size(); ++j) {
    double dt = phi.times[j] - phi.times[j - 1];
    double q = (phi.values[j] - phi.values[j - 1]) / dt;
    if (q > rep.max_quotient) {
      rep.max_quotient = q;
      rep.worst_time = phi.times[j - 1];
    }
    double shifted = (phi.values[j] - M * phi.times[j]) -
                     (phi.values[j - 1] - M * phi.times[j - 1]);
    if (shifted > 1e-12) rep.shifted_nonincreasing = false;
    if (q > M + 1e-12) {
      rep.quotient_bounded = false;
      if (N.has_value() && phi.values[j - 1] < *N) rep.capped_premise = false;
    }
  }
  return rep;
}

BarbalatReport barbalat_probe(const SampledSignal& phi, const rates::RateFunction& rho,
                              double tail_fraction, const BarbalatOptions& opt) {
  phi.validate();
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
    throw std::invalid_argument("tail fraction must lie in (0, 1)");

  std::vector<double> integrand(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) integrand[i] = rho(phi.values[i]);

  BarbalatReport rep;
  const double t0 = phi.times.front(), t1 = phi.times.back();
  rep.tail_window_start = t0 + (1.0 - tail_fraction) * (t1 - t0);
  std::size_t tail_from = 0;
  while (tail_from + 1 < phi.size() && phi.times[tail_from] < rep.tail_window_start) ++tail_from;

  rep.integral = trapezoid(phi.times, integrand, 0, phi.size() - 1);
  rep.tail_integral = trapezoid(phi.times, integrand, tail_from, phi.size() - 1);
  for (std::size_t i = tail_from; i < phi.size(); ++i)
    rep.tail_sup = std::max(rep.tail_sup, phi.values[i]);
  rep.integral_converged =
      rep.tail_integral <= opt.convergence_rel * rep.integral + opt.convergence_abs;
  rep.quc = quc_check(phi, opt.eps_list, opt.delta_grid).quc;
  rep.rho_positive_definite = rho.flags().positive_definite;
  rep.consistent = !(rep.integral_converged && rep.quc && rep.rho_positive_definite &&
                     rep.tail_sup > opt.tail_sup_threshold);
  return rep;
}

KLEnvelope kl_fit(const std::vector<std::pair<double, dynsys::Trajectory>>& ensemble,
                  const KlFitOptions& opt) {
  if (ensemble.empty()) throw InsufficientEnsemble("ensemble is empty");
  if (opt.n_t < 2) throw std::invalid_argument("need at least two time knots");

  std::vector<double> s_knots;
  for (const auto& [s, traj] : ensemble) {
    if (traj.size() < 2) throw InsufficientEnsemble("trajectory with fewer than two samples");
    s_knots.push_back(s);
  }
  std::sort(s_knots.begin(), s_knots.end());
  s_knots.erase(std::unique(s_knots.begin(), s_knots.end()), s_knots.end());

  if (opt.enforce_recommended) {
    if (s_knots.size() < 5)
      throw InsufficientEnsemble("fewer than five distinct initial norms");
    for (double s : s_knots) {
      std::size_t n = 0;
      for (const auto& e : ensemble) n += e.first == s;
      if (n < 5) throw InsufficientEnsemble("fewer than five trajectories at an initial norm");
    }
  }

  double t_max = std::numeric_limits<double>::infinity();
  for (const auto& e : ensemble) t_max = std::min(t_max, e.second.times.back());

  KLEnvelope env;
  env.s_knots = s_knots;
  env.t_knots.resize(static_cast<std::size_t>(opt.n_t));
  for (int k = 0; k < opt.n_t; ++k) env.t_knots[k] = t_max * k / (opt.n_t - 1);
  env.values.assign(s_knots.size(), std::vector<double>(env.t_knots.size(), 0.0));

  for (const auto& [s, traj] : ensemble) {
    auto row = static_cast<std::size_t>(
        std::lower_bound(s_knots.begin(), s_knots.end(), s) - s_knots.begin());
    std::size_t seg = 0;
    for (std::size_t k = 0; k < env.t_knots.size(); ++k) {
      double t = env.t_knots[k];
      while (seg + 2 < traj.size() && traj.times[seg + 1] <= t) ++seg;
      double ta = traj.times[seg], tb = traj.times[seg + 1];
      double w = tb > ta ? std::clamp((t - ta) / (tb - ta), 0.0, 1.0) : 0.0;
      double yn = (1.0 - w) * traj.output_norm(seg) + w * traj.output_norm(seg + 1);
      env.values[row][k] = std::max(env.values[row][k], yn);
    }
  }

  // Shape passes: running max backward in time, then cumulative max upward in
  // the initial norm.
  for (auto& row : env.values)
    for (std::size_t k = row.size() - 1; k-- > 0;) row[k] = std::max(row[k], row[k + 1]);
  for (std::size_t r = 1; r < env.values.size(); ++r)
    for (std::size_t k = 0; k < env.values[r].size(); ++k)
      env.values[r][k] = std::max(env.values[r][k], env.values[r - 1][k]);
  return env;
}

namespace {

struct TrialDraw {
  Vec x0;
  dynsys::DisturbanceSignal signal;
};

TrialDraw draw_trial(const dynsys::DynamicalSystem& sys, const FalsifyOptions& opt,
                     std::uint64_t seed, int trial) {
  std::mt19937_64 rng(mix_key(seed, static_cast<std::uint64_t>(trial)));
  TrialDraw td{Vec(), dynsys::DisturbanceSignal::zero(sys.dim_disturbance)};
  td.x0 = dynsys::DomainSpec::ball(sys.dim_state, opt.R).sample(rng);
  if (sys.dim_disturbance == 0) return td;

  std::uniform_int_distribution<int> n_sw(0, opt.max_switches);
  int k = n_sw(rng);
  std::vector<double> times{0.0};
  std::uniform_real_distribution<double> when(0.0, opt.horizon);
  std::vector<double> raw(static_cast<std::size_t>(k));
  for (auto& t : raw) t = when(rng);
  std::sort(raw.begin(), raw.end());
  for (double t : raw)
    if (t - times.back() > 1e-9 && opt.horizon - t > 1e-9) times.push_back(t);
  std::vector<Vec> levels(times.size());
  for (auto& v : levels) v = sys.disturbance_set.sample(rng);
  td.signal = dynsys::DisturbanceSignal::piecewise(std::move(times), std::move(levels));
  return td;
}

}  // namespace

FalsifyWitness falsify(const dynsys::DynamicalSystem& sys, const FalsifyObjective& objective,
                       int budget, std::uint64_t seed, const FalsifyOptions& opt) {
  if (budget < 1) throw std::invalid_argument("budget must be positive");
  if (objective.kind == FalsifyObjective::Kind::envelope_violation && !objective.envelope)
    throw std::invalid_argument("envelope objective needs an envelope function");
  if (objective.kind == FalsifyObjective::Kind::max_attainment_time &&
      !(objective.epsilon > 0.0))
    throw std::invalid_argument("attainment objective needs a positive epsilon");

  dynsys::SimOptions sim;
  sim.tol = opt.tol;

  struct Outcome {
    double value = -std::numeric_limits<double>::infinity();
    bool not_attained = false;
  };
  auto run_trial = [&](int trial) {
    TrialDraw td = draw_trial(sys, opt, seed, trial);
    auto traj = dynsys::simulate(sys, td.x0, td.signal, opt.horizon, sim);
    Outcome oc;
    if (objective.kind == FalsifyObjective::Kind::max_attainment_time) {
      auto att = attainment_time(traj, objective.epsilon);
      oc.not_attained = !att.has_value();
      oc.value = oc.not_attained ? opt.horizon : *att;
    } else {
      double x0n = 0.0;
      for (double v : td.x0) x0n += v * v;
      x0n = std::sqrt(x0n);
      for (std::size_t i = 0; i < traj.size(); ++i)
        oc.value = std::max(oc.value,
                            traj.output_norm(i) - objective.envelope(x0n, traj.times[i]));
    }
    return oc;
  };

  std::vector<Outcome> outcomes(static_cast<std::size_t>(budget));
  parallel_for(
      static_cast<std::size_t>(budget),
      [&](std::size_t i) { outcomes[i] = run_trial(static_cast<int>(i)); }, opt.jobs);

  int best = 0;
  for (int i = 1; i < budget; ++i)
    if (outcomes[i].value > outcomes[best].value ||
        (outcomes[i].not_attained && !outcomes[best].not_attained &&
         outcomes[i].value >= outcomes[best].value))
      best = i;

  TrialDraw td = draw_trial(sys, opt, seed, best);
  FalsifyWitness w{std::move(td.x0), std::move(td.signal), outcomes[best].value,
                   outcomes[best].not_attained, best};
  return w;
}

}  // namespace outstab::probes

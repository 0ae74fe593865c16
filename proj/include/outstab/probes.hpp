#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "outstab/dynsys.hpp"
#include "outstab/rates.hpp"

namespace outstab::probes {

using dynsys::Vec;

// Scalar time series on a strictly increasing grid (step >= 1e-9).
struct SampledSignal {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
  void validate() const;  // throws std::invalid_argument
};

SampledSignal sample_function(const std::function<double(double)>& f, double t0, double t1,
                              int n);

// Triangular bumps of height 1 at integer times n = 1..n_bumps, the n-th with
// half-width 2^-(n+1). The grid carries each bump's base and apex exactly.
SampledSignal spike_train(int n_bumps, double horizon, int points_per_side = 16,
                          double base_dt = 0.05);

// Last-exceedance attainment: smallest grid time t* such that |y| <= epsilon
// at every grid point from t* on. Returns 0 when the output never exceeds
// epsilon and nullopt when the final sample still exceeds it.
std::optional<double> attainment_time(const dynsys::Trajectory& traj, double epsilon);

struct ProbeOptions {
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::optional<double> theory_T;  // uniform bound to compare against
  double tail_fraction = 0.2;
};

struct UniformityReport {
  std::string notion = "uniform-attainment";
  int n_trajectories = 0;
  double R = 0.0, epsilon = 0.0, horizon = 0.0;
  double sup_attainment = 0.0;
  int not_attained = 0;       // counter-evidence, not an error
  double max_overshoot = 0.0; // max |y| over the whole ensemble
  double tail_max = 0.0;      // max |y| over trailing windows
  std::optional<double> theory_T;
  bool within_theory = true;
  std::vector<double> attainment_times;  // -1 marks not attained
};

// Simulates n_init seeded initial states in the R-ball against each signal
// and aggregates attainment statistics.
UniformityReport uniformity_probe(const dynsys::DynamicalSystem& sys, double R, double epsilon,
                                  int n_init, const std::vector<dynsys::DisturbanceSignal>& signals,
                                  double horizon, const ProbeOptions& opt = {});

struct QucWitness {
  double t0 = 0.0, t1 = 0.0;
  double increment = 0.0;
  double eps = 0.0, delta = 0.0;
};

struct QucPerEps {
  double eps = 0.0;
  bool holds = false;
  double best_delta = 0.0;  // largest tested delta with no violating pair
  std::optional<QucWitness> witness;
};

struct QucReport {
  bool quc = true;
  std::vector<QucPerEps> per_eps;
  std::optional<QucWitness> witness;
};

// Finite-lattice forward-increment check: for each eps, searches the delta
// grid for a window size under which no sampled pair (t0, t in [t0, t0+delta])
// gains eps or more. A false verdict carries an explicit witness pair; a true
// verdict only certifies the tested lattice.
QucReport quc_check(const SampledSignal& phi, std::span<const double> eps_list,
                    std::span<const double> delta_grid);

struct QucSufficientReport {
  bool shifted_nonincreasing = false;     // phi(t) - M t nonincreasing on samples
  bool quotient_bounded = false;          // forward difference quotients <= M
  std::optional<bool> capped_premise;     // quotients <= M on samples with phi < N
  double max_quotient = 0.0;
  double worst_time = 0.0;
};

// Numeric check of the sufficient conditions (drift bound M, optional cap N).
QucSufficientReport quc_sufficient(const SampledSignal& phi, double M,
                                   std::optional<double> N = std::nullopt);

struct BarbalatOptions {
  double tail_sup_threshold = 0.05;
  double convergence_rel = 0.01;   // tail share of the integral
  double convergence_abs = 1e-6;
  std::vector<double> eps_list = {0.1, 0.25, 0.5};
  std::vector<double> delta_grid = {1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5};
};

struct BarbalatReport {
  double integral = 0.0;       // trapezoid of rho(phi)
  double tail_integral = 0.0;
  double tail_sup = 0.0;       // max phi over the tail window
  double tail_window_start = 0.0;
  bool integral_converged = false;
  bool quc = false;
  bool rho_positive_definite = false;
  // false only when a convergent integral, verified regularity, and a
  // non-vanishing tail coexist.
  bool consistent = true;
};

BarbalatReport barbalat_probe(const SampledSignal& phi, const rates::RateFunction& rho,
                              double tail_fraction = 0.2, const BarbalatOptions& opt = {});

// Empirical two-parameter envelope: nondecreasing in the initial-norm knot,
// nonincreasing in time (running max over [t, horizon] by construction).
struct KLEnvelope {
  std::vector<double> s_knots;
  std::vector<double> t_knots;
  std::vector<std::vector<double>> values;  // rows follow s_knots
};

struct KlFitOptions {
  int n_t = 200;
  bool enforce_recommended = false;  // require >= 5 norms x 5 trajectories
};

// ensemble entries: (initial norm, trajectory). Throws InsufficientEnsemble.
KLEnvelope kl_fit(const std::vector<std::pair<double, dynsys::Trajectory>>& ensemble,
                  const KlFitOptions& opt = {});

struct FalsifyObjective {
  enum class Kind { max_attainment_time, envelope_violation };
  Kind kind = Kind::max_attainment_time;
  double epsilon = 0.1;  // attainment threshold
  std::function<double(double, double)> envelope;  // (initial norm, t) -> bound
};

struct FalsifyOptions {
  double R = 1.0;
  double horizon = 10.0;
  double tol = 1e-8;
  int max_switches = 8;
  int jobs = 0;
};

struct FalsifyWitness {
  Vec x0;
  dynsys::DisturbanceSignal signal;
  double objective = 0.0;
  bool not_attained = false;
  int trial = -1;
};

// Random search over seeded initial states and piecewise-constant
// disturbances; returns the worst case found. Reproducible: trial i draws
// from a generator keyed by (seed, i), so results do not depend on job count.
FalsifyWitness falsify(const dynsys::DynamicalSystem& sys, const FalsifyObjective& objective,
                       int budget, std::uint64_t seed, const FalsifyOptions& opt = {});

}  // namespace outstab::probes

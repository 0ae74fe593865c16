#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "outstab/domain.hpp"
#include "outstab/errors.hpp"
#include "outstab/fields.hpp"
#include "outstab/signals.hpp"

namespace outstab::dynsys {

// Finite-dimensional control system x' = f(x, d), y = h(x).
struct DynamicalSystem {
  int dim_state = 0;
  int dim_disturbance = 0;
  int dim_output = 0;
  std::function<void(std::span<const double>, std::span<const double>, std::span<double>)> field;
  std::function<void(std::span<const double>, std::span<double>)> output;
  DomainSpec disturbance_set;
  // true when f(0, d) = 0 for every d in the disturbance set; otherwise only
  // f(0, 0) = 0 is required.
  bool equilibrium_under_all_d = false;
  // Scalar surfaces where the field loses smoothness; the integrator caps its
  // step size while |g(x)| is small.
  std::vector<std::function<double(std::span<const double>)>> kink_surfaces;

  Vec rhs(std::span<const double> x, std::span<const double> d) const {
    Vec dx(static_cast<std::size_t>(dim_state));
    field(x, d, dx);
    return dx;
  }

  Vec out(std::span<const double> x) const {
    Vec y(static_cast<std::size_t>(dim_output));
    output(x, y);
    return y;
  }

  // Checks h(0) = 0 and the declared equilibrium property on sampled d.
  // Throws std::invalid_argument on failure.
  void validate() const;
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  double max_error_rate = 0.0;  // max over accepted steps of err / h
  double min_step = std::numeric_limits<double>::infinity();
  long kink_capped = 0;
};

struct Trajectory {
  std::vector<double> times;    // starts at 0, strictly increasing
  std::vector<Vec> states;
  std::vector<Vec> outputs;
  StepStats step_stats;

  std::size_t size() const { return times.size(); }
  int dim_state() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
  int dim_output() const { return outputs.empty() ? 0 : static_cast<int>(outputs[0].size()); }
  double output_norm(std::size_t i) const;
};

struct SimOptions {
  double tol = 1e-8;            // local error per unit time, in [1e-12, 1e-2]
  double max_step = 0.0;        // 0 -> horizon / 1000
  double blowup_guard = 1e9;    // throw StateBlowup beyond this state norm
  double kink_tol = 1e-6;       // |g(x)| below this activates the cap
  double kink_step_cap = 1e-3;
};

// Embedded 4(5) pair with error control per unit time; steps never straddle
// signal switch times. Throws StateBlowup / StepUnderflow.
Trajectory simulate(const DynamicalSystem& sys, const Vec& x0, const DisturbanceSignal& d,
                    double horizon, const SimOptions& opt = {});

// Classic fixed-step fourth-order scheme on a uniform grid.
Trajectory simulate_fixed(const DynamicalSystem& sys, const Vec& x0, const DisturbanceSignal& d,
                          double horizon, int n_steps, double blowup_guard = 1e9);

}  // namespace outstab::dynsys

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "outstab/domain.hpp"
#include "outstab/fields.hpp"

namespace outstab::dynsys {

enum class SignalKind { zero, constant, piecewise_constant, sinusoid, decaying, random_steps };

std::string to_string(SignalKind k);
SignalKind signal_kind_from_string(const std::string& s);

// Declarative description of a disturbance signal; realized by make_signal.
struct SignalSpec {
  SignalKind kind = SignalKind::zero;
  Vec value;                   // constant
  std::vector<double> times;   // piecewise_constant, first entry 0
  std::vector<Vec> values;     // piecewise_constant
  Vec amplitude;               // sinusoid / decaying
  double omega = 1.0;          // sinusoid
  double phase = 0.0;          // sinusoid
  double rate = 1.0;           // decaying: amplitude * exp(-rate * t)
  int n_steps = 0;             // random_steps
  double span = 0.0;           // random_steps: switches at i * span / n_steps
};

// Piecewise-regular disturbance on [0, inf). Piecewise kinds are
// right-continuous at their switch times.
class DisturbanceSignal {
 public:
  DisturbanceSignal() = default;

  int dim() const { return dim_; }
  SignalKind kind() const { return kind_; }
  double sup_norm() const { return sup_norm_; }

  // left=true evaluates the segment ending at t (only differs from the
  // right-continuous value exactly at a switch time).
  void eval(double t, std::span<double> out, bool left = false) const;
  Vec operator()(double t) const;

  // Interior switch times, sorted ascending. Empty for smooth kinds.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  static DisturbanceSignal zero(int dim);
  static DisturbanceSignal constant(Vec v);
  static DisturbanceSignal piecewise(std::vector<double> times, std::vector<Vec> values);
  static DisturbanceSignal random_steps(std::vector<double> times, std::vector<Vec> values);
  static DisturbanceSignal sinusoid(Vec amplitude, double omega, double phase);
  static DisturbanceSignal decaying(Vec amplitude, double rate);

 private:
  SignalKind kind_ = SignalKind::zero;
  int dim_ = 0;
  double sup_norm_ = 0.0;
  std::vector<double> times_;   // piecewise segment starts, times_[0] == 0
  std::vector<Vec> values_;     // piecewise segment values
  Vec amplitude_;
  double omega_ = 1.0, phase_ = 0.0, rate_ = 1.0;
  std::vector<double> breakpoints_;
};

// Realizes a spec, drawing random-step levels from the domain with the given
// seed, and verifies that every value the signal can take lies in the domain.
// Throws OutOfDomain otherwise.
DisturbanceSignal make_signal(const SignalSpec& spec, const DomainSpec& domain,
                              std::uint64_t seed = 0);

}  // namespace outstab::dynsys

#include "outstab/signals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "outstab/errors.hpp"

namespace outstab::dynsys {

namespace {

double norm2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::string to_string(SignalKind k) {
  switch (k) {
    case SignalKind::zero: return "zero";
    case SignalKind::constant: return "constant";
    case SignalKind::piecewise_constant: return "piecewise-constant";
    case SignalKind::sinusoid: return "sinusoid";
    case SignalKind::decaying: return "decaying";
    case SignalKind::random_steps: return "random-steps";
  }
  return "zero";
}

SignalKind signal_kind_from_string(const std::string& s) {
  if (s == "zero") return SignalKind::zero;
  if (s == "constant") return SignalKind::constant;
  if (s == "piecewise-constant") return SignalKind::piecewise_constant;
  if (s == "sinusoid") return SignalKind::sinusoid;
  if (s == "decaying") return SignalKind::decaying;
  if (s == "random-steps") return SignalKind::random_steps;
  throw std::invalid_argument("unknown signal kind: " + s);
}

void DisturbanceSignal::eval(double t, std::span<double> out, bool left) const {
  const auto n = static_cast<std::size_t>(dim_);
  switch (kind_) {
    case SignalKind::zero:
      for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
      return;
    case SignalKind::constant:
      for (std::size_t i = 0; i < n; ++i) out[i] = values_[0][i];
      return;
    case SignalKind::piecewise_constant:
    case SignalKind::random_steps: {
      // Segment i covers [times_[i], times_[i+1]); left picks the segment
      // ending at t when t is exactly a switch time.
      auto it = std::upper_bound(times_.begin(), times_.end(), t);
      std::size_t idx = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
      if (left && idx > 0 && times_[idx] == t) --idx;
      for (std::size_t i = 0; i < n; ++i) out[i] = values_[idx][i];
      return;
    }
    case SignalKind::sinusoid: {
      double s = std::sin(omega_ * t + phase_);
      for (std::size_t i = 0; i < n; ++i) out[i] = amplitude_[i] * s;
      return;
    }
    case SignalKind::decaying: {
      double e = std::exp(-rate_ * t);
      for (std::size_t i = 0; i < n; ++i) out[i] = amplitude_[i] * e;
      return;
    }
  }
}

Vec DisturbanceSignal::operator()(double t) const {
  Vec v(static_cast<std::size_t>(dim_));
  eval(t, v);
  return v;
}

DisturbanceSignal DisturbanceSignal::zero(int dim) {
  DisturbanceSignal s;
  s.kind_ = SignalKind::zero;
  s.dim_ = dim;
  s.sup_norm_ = 0.0;
  return s;
}

DisturbanceSignal DisturbanceSignal::constant(Vec v) {
  DisturbanceSignal s;
  s.kind_ = SignalKind::constant;
  s.dim_ = static_cast<int>(v.size());
  s.sup_norm_ = norm2(v);
  s.values_.push_back(std::move(v));
  return s;
}

DisturbanceSignal DisturbanceSignal::piecewise(std::vector<double> times,
                                               std::vector<Vec> values) {
  if (times.empty() || times.size() != values.size())
    throw std::invalid_argument("piecewise signal needs matching times and values");
  if (times[0] != 0.0) throw std::invalid_argument("piecewise signal must start at t = 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("piecewise switch times must increase");
  DisturbanceSignal s;
  s.kind_ = SignalKind::piecewise_constant;
  s.dim_ = static_cast<int>(values[0].size());
  for (const auto& v : values) {
    if (static_cast<int>(v.size()) != s.dim_)
      throw std::invalid_argument("piecewise values have mixed dimensions");
    s.sup_norm_ = std::max(s.sup_norm_, norm2(v));
  }
  s.breakpoints_.assign(times.begin() + 1, times.end());
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

DisturbanceSignal DisturbanceSignal::random_steps(std::vector<double> times,
                                                  std::vector<Vec> values) {
  auto s = piecewise(std::move(times), std::move(values));
  s.kind_ = SignalKind::random_steps;
  return s;
}

DisturbanceSignal DisturbanceSignal::sinusoid(Vec amplitude, double omega, double phase) {
  DisturbanceSignal s;
  s.kind_ = SignalKind::sinusoid;
  s.dim_ = static_cast<int>(amplitude.size());
  s.sup_norm_ = omega == 0.0 ? norm2(amplitude) * std::abs(std::sin(phase)) : norm2(amplitude);
  s.amplitude_ = std::move(amplitude);
  s.omega_ = omega;
  s.phase_ = phase;
  return s;
}

DisturbanceSignal DisturbanceSignal::decaying(Vec amplitude, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("decay rate must be positive");
  DisturbanceSignal s;
  s.kind_ = SignalKind::decaying;
  s.dim_ = static_cast<int>(amplitude.size());
  s.sup_norm_ = norm2(amplitude);
  s.amplitude_ = std::move(amplitude);
  s.rate_ = rate;
  return s;
}

DisturbanceSignal make_signal(const SignalSpec& spec, const DomainSpec& domain,
                              std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(domain.dim());
  auto require_in_domain = [&](const Vec& v, const char* what) {
    if (static_cast<int>(v.size()) != domain.dim())
      throw OutOfDomain(std::string(what) + ": dimension mismatch");
    if (!domain.contains(v)) throw OutOfDomain(std::string(what) + ": value outside domain");
  };

  switch (spec.kind) {
    case SignalKind::zero: {
      require_in_domain(Vec(n, 0.0), "zero signal");
      return DisturbanceSignal::zero(domain.dim());
    }
    case SignalKind::constant: {
      require_in_domain(spec.value, "constant signal");
      return DisturbanceSignal::constant(spec.value);
    }
    case SignalKind::piecewise_constant: {
      for (const auto& v : spec.values) require_in_domain(v, "piecewise signal");
      return DisturbanceSignal::piecewise(spec.times, spec.values);
    }
    case SignalKind::sinusoid: {
      // The signal sweeps the segment between -amplitude and amplitude; for
      // the convex kinds checking the endpoints and 0 suffices.
      if (domain.kind() == DomainKind::finite_set || domain.kind() == DomainKind::singleton_zero) {
        if (norm2(spec.amplitude) > 0.0)
          throw OutOfDomain("sinusoid needs a convex domain");
        return DisturbanceSignal::sinusoid(Vec(n, 0.0), spec.omega, spec.phase);
      }
      Vec neg(spec.amplitude);
      for (double& x : neg) x = -x;
      require_in_domain(spec.amplitude, "sinusoid amplitude");
      require_in_domain(neg, "sinusoid amplitude");
      require_in_domain(Vec(n, 0.0), "sinusoid");
      return DisturbanceSignal::sinusoid(spec.amplitude, spec.omega, spec.phase);
    }
    case SignalKind::decaying: {
      if (domain.kind() == DomainKind::finite_set || domain.kind() == DomainKind::singleton_zero) {
        if (norm2(spec.amplitude) > 0.0)
          throw OutOfDomain("decaying signal needs a convex domain");
        return DisturbanceSignal::decaying(Vec(n, 0.0), spec.rate);
      }
      require_in_domain(spec.amplitude, "decaying amplitude");
      require_in_domain(Vec(n, 0.0), "decaying signal");
      return DisturbanceSignal::decaying(spec.amplitude, spec.rate);
    }
    case SignalKind::random_steps: {
      if (spec.n_steps < 1 || !(spec.span > 0.0))
        throw std::invalid_argument("random steps need n_steps >= 1 and a positive span");
      std::mt19937_64 rng(seed);
      std::vector<double> times(static_cast<std::size_t>(spec.n_steps));
      std::vector<Vec> values(static_cast<std::size_t>(spec.n_steps));
      for (int i = 0; i < spec.n_steps; ++i) {
        times[static_cast<std::size_t>(i)] = spec.span * i / spec.n_steps;
        values[static_cast<std::size_t>(i)] = domain.sample(rng);
      }
      return DisturbanceSignal::random_steps(std::move(times), std::move(values));
    }
  }
  throw std::invalid_argument("unknown signal kind");
}

}  // namespace outstab::dynsys

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "outstab/builtin.hpp"
#include "outstab/errors.hpp"
#include "outstab/probes.hpp"

using namespace outstab;
using dynsys::Vec;

namespace {

dynsys::Trajectory fake_trajectory(std::vector<double> times,
                                   std::vector<double> outputs) {
  dynsys::Trajectory traj;
  traj.times = std::move(times);
  for (double y : outputs) {
    traj.states.push_back({y});
    traj.outputs.push_back({y});
  }
  return traj;
}

}  // namespace

TEST_CASE("attainment time is the last exceedance") {
  auto traj = fake_trajectory({0.0, 1.0, 2.0, 3.0}, {2.0, 0.5, 0.2, 0.05});
  CHECK(probes::attainment_time(traj, 0.1) == 3.0);
  CHECK(probes::attainment_time(traj, 0.6) == 1.0);
  CHECK(probes::attainment_time(traj, 3.0) == 0.0);
  CHECK_FALSE(probes::attainment_time(traj, 0.01).has_value());
}

TEST_CASE("sampled signals validate their grid") {
  probes::SampledSignal s;
  s.times = {0.0, 1.0, 1.0};
  s.values = {0.0, 1.0, 0.0};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.times = {0.0, 1.0};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);  // size mismatch
}

TEST_CASE("spike train carries exact apexes of shrinking width") {
  auto phi = probes::spike_train(3, 5.0);
  phi.validate();
  for (int n = 1; n <= 3; ++n) {
    bool apex = false;
    for (std::size_t i = 0; i < phi.size(); ++i)
      if (phi.times[i] == static_cast<double>(n) && phi.values[i] == 1.0)
        apex = true;
    CHECK(apex);
  }
  CHECK_THROWS_AS(probes::spike_train(10, 5.0), std::invalid_argument);
}

TEST_CASE("increment lattice check rejects spikes and accepts decay") {
  auto spikes = probes::spike_train(6, 8.0);
  std::vector<double> eps = {0.5};
  std::vector<double> deltas = {0.01, 0.25};
  auto bad = probes::quc_check(spikes, eps, deltas);
  CHECK_FALSE(bad.quc);
  REQUIRE(bad.witness.has_value());
  CHECK(bad.witness->increment >= 0.5);
  CHECK(bad.witness->t1 - bad.witness->t0 <= 0.25 + 1e-12);

  auto decay = probes::sample_function([](double t) { return std::exp(-t); },
                                       0.0, 10.0, 1001);
  auto good = probes::quc_check(decay, eps, deltas);
  CHECK(good.quc);
  CHECK_FALSE(good.witness.has_value());
  REQUIRE(good.per_eps.size() == 1);
  CHECK(good.per_eps[0].holds);
  CHECK(good.per_eps[0].best_delta == 0.25);  // largest tested window is clean
}

TEST_CASE("sufficient increment conditions hold for a capped ramp") {
  auto phi = probes::sample_function(
      [](double t) { return std::min(t, 5.0); }, 0.0, 10.0, 101);
  auto rep = probes::quc_sufficient(phi, 1.0);
  CHECK(rep.shifted_nonincreasing);
  CHECK(rep.quotient_bounded);
  CHECK(rep.max_quotient <= 1.0 + 1e-12);
  auto capped = probes::quc_sufficient(phi, 1.0, 5.0);
  REQUIRE(capped.capped_premise.has_value());
  CHECK(*capped.capped_premise);
}

TEST_CASE("integral-regularity probe separates decay from spikes") {
  auto decay = probes::sample_function([](double t) { return std::exp(-t); },
                                       0.0, 25.0, 5001);
  auto repA = probes::barbalat_probe(decay, rates::RateFunction::identity());
  CHECK(repA.quc);
  CHECK(std::abs(repA.integral - 1.0) <= 1e-3);
  CHECK(repA.tail_sup < 1e-2);
  CHECK(repA.integral_converged);
  CHECK(repA.rho_positive_definite);
  CHECK(repA.consistent);

  auto spikes = probes::spike_train(19, 20.0);
  auto repB = probes::barbalat_probe(spikes, rates::RateFunction::identity());
  CHECK(repB.integral < 1.01);
  CHECK_FALSE(repB.quc);
  CHECK(repB.tail_sup == 1.0);
  CHECK(repB.consistent);
}

TEST_CASE("envelope fit orders knots and needs data") {
  std::vector<std::pair<double, dynsys::Trajectory>> ensemble;
  for (double s : {2.0, 1.0, 3.0}) {
    std::vector<double> times, vals;
    std::vector<double> ys;
    for (int i = 0; i <= 50; ++i) {
      times.push_back(0.2 * i);
      ys.push_back(s * std::exp(-0.2 * i));
    }
    ensemble.emplace_back(s, fake_trajectory(times, ys));
  }
  auto env = probes::kl_fit(ensemble);
  CHECK(env.s_knots == std::vector<double>{1.0, 2.0, 3.0});
  REQUIRE(env.values.size() == 3);
  for (std::size_t i = 0; i + 1 < env.s_knots.size(); ++i)
    for (std::size_t j = 0; j < env.t_knots.size(); ++j)
      CHECK(env.values[i][j] <= env.values[i + 1][j] + 1e-12);
  for (const auto& row : env.values)
    for (std::size_t j = 0; j + 1 < row.size(); ++j)
      CHECK(row[j + 1] <= row[j] + 1e-12);

  CHECK_THROWS_AS(probes::kl_fit({}), InsufficientEnsemble);
  probes::KlFitOptions strict;
  strict.enforce_recommended = true;
  CHECK_THROWS_AS(probes::kl_fit(ensemble, strict), InsufficientEnsemble);
}

TEST_CASE("uniformity probe is deterministic and attains") {
  auto sys = builtin::example1();
  std::vector<dynsys::DisturbanceSignal> signals = {
      dynsys::DisturbanceSignal::constant({0.5})};
  probes::ProbeOptions opt;
  opt.seed = 11;
  auto r1 = probes::uniformity_probe(sys, 3.0, 2.0, 4, signals, 20.0, opt);
  auto r2 = probes::uniformity_probe(sys, 3.0, 2.0, 4, signals, 20.0, opt);
  CHECK(r1.attainment_times == r2.attainment_times);
  CHECK(r1.n_trajectories == 4);
  CHECK(r1.not_attained == 0);
  CHECK(r1.sup_attainment >= 0.0);
  CHECK(r1.max_overshoot <= 3.0 + 1e-6);
  CHECK(r1.within_theory);  // no reference bound supplied
}

TEST_CASE("falsification is reproducible and job-count independent") {
  auto sys = builtin::example1();
  probes::FalsifyObjective obj;
  obj.epsilon = 3.0;
  probes::FalsifyOptions opt;
  opt.R = 5.0;
  opt.horizon = 10.0;
  opt.jobs = 1;
  auto w1 = probes::falsify(sys, obj, 40, 9, opt);
  opt.jobs = 3;
  auto w2 = probes::falsify(sys, obj, 40, 9, opt);
  CHECK(w1.objective == w2.objective);
  CHECK(w1.trial == w2.trial);
  CHECK(w1.x0 == w2.x0);
  CHECK_FALSE(w1.not_attained);
  CHECK(w1.objective > 0.0);
}

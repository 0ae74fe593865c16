#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "outstab/builtin.hpp"
#include "outstab/certkit.hpp"
#include "outstab/dads.hpp"
#include "outstab/errors.hpp"
#include "outstab/io.hpp"

using namespace outstab;
using certkit::DomainSample;
using certkit::TheoremId;
using dynsys::Vec;

TEST_CASE("theorem names round-trip") {
  for (auto id : {TheoremId::LAGRANGE, TheoremId::LYAP_LOCAL, TheoremId::THM1_CASE_I,
                  TheoremId::THM1_CASE_II, TheoremId::THM2_I, TheoremId::THM2_II,
                  TheoremId::THM3_IOS})
    CHECK(certkit::theorem_from_string(certkit::to_string(id)) == id);
  CHECK_THROWS_AS(certkit::theorem_from_string("thm9"), std::invalid_argument);
}

TEST_CASE("domain sample enumerates the tensor grid") {
  DomainSample s;
  s.box_lo = {-1.0, 0.0};
  s.box_hi = {1.0, 2.0};
  s.density = {3, 5};
  CHECK(s.state_count() == 15);
  CHECK(s.state_point(0) == Vec{-1.0, 0.0});
  CHECK(s.state_point(14) == Vec{1.0, 2.0});
  auto h = s.spacing();
  CHECK(h[0] == doctest::Approx(1.0));
  CHECK(h[1] == doctest::Approx(0.5));
}

TEST_CASE("implication scan finds planted violations and refines them") {
  DomainSample s;
  s.box_lo = {-1.0};
  s.box_hi = {1.0};
  s.density = {5};
  s.disturbance_samples = {{}};
  auto result = certkit::check_implication(
      [](std::span<const double>, std::span<const double>) { return true; },
      [](std::span<const double> x, std::span<const double>) { return x[0] * x[0]; },
      [](std::span<const double>, std::span<const double>) { return 0.5; }, s,
      "planted");
  CHECK(result.checked == 5);
  int base = 0, refined = 0;
  for (const auto& v : result.violations) {
    (v.refined ? refined : base)++;
    CHECK(v.lhs > 0.5 + 1e-9);
    CHECK(v.margin == doctest::Approx(v.lhs - v.rhs));
    CHECK(v.condition == "planted");
  }
  CHECK(base == 2);  // x = -1 and x = 1
  CHECK(refined > 0);
}

TEST_CASE("the planar benchmark certificate passes on a coarse grid") {
  auto sys = builtin::example1();
  auto bundle = builtin::example1_bundle();
  DomainSample s;
  s.box_lo = {-5.0, -5.0};
  s.box_hi = {5.0, 5.0};
  s.density = {21, 21};
  s.disturbance_samples = sys.disturbance_set.grid(5);
  auto v = certkit::certify(sys, bundle, TheoremId::THM3_IOS, s);
  CHECK(v.passed);
  CHECK(v.violations.empty());
  CHECK(v.checked_points > 0);
  CHECK(v.tail_condition.satisfied);
}

TEST_CASE("an inflated decay rate is caught at a known grid point") {
  auto sys = builtin::example1();
  auto bundle = builtin::example1_bundle();
  bundle.rho = rates::RateFunction::identity();  // demands x2^2 decay, too fast
  DomainSample s;
  s.box_lo = {-1.0, -1.0};
  s.box_hi = {1.0, 1.0};
  s.density = {3, 3};
  s.disturbance_samples = {{1.0 / std::sqrt(8.0)}};
  auto v = certkit::certify(sys, bundle, TheoremId::THM3_IOS, s);
  CHECK_FALSE(v.passed);
  bool found = false;
  for (const auto& viol : v.violations) {
    if (viol.refined || viol.x != Vec{0.0, 1.0}) continue;
    found = true;
    // V' along the flow is -1 + d at this point, the demanded rate is -1
    CHECK(viol.lhs == doctest::Approx(-1.0 + 1.0 / std::sqrt(8.0)).epsilon(1e-12));
    CHECK(viol.rhs == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(viol.margin == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-9));
  }
  CHECK(found);
}

TEST_CASE("the adaptive loop certificate passes the second-case conditions") {
  dads::DadsParams p;
  p.Gamma = 1.0;
  p.eps_dz = 0.1;
  p.c = 1.0;
  p.a = 0.5;
  auto sys = dads::make_closed_loop(2.0, p, dynsys::DomainSpec::ball(1, 1.0));
  auto bundle = dads::dads_certificates(p, 2.0, 1.0);
  DomainSample s;
  s.box_lo = {-2.0, -1.0};
  s.box_hi = {2.0, 1.0};
  s.density = {21, 21};
  s.disturbance_samples = {{0.0}};
  auto v = certkit::certify(sys, bundle, TheoremId::THM1_CASE_II, s);
  CHECK(v.passed);
}

TEST_CASE("theorems demand their bundle fields") {
  dads::DadsParams p;
  auto sys = dads::make_closed_loop(1.5, p, dynsys::DomainSpec::ball(1, 1.0));
  auto bundle = dads::dads_certificates(p, 1.5, 1.0);  // no chi
  DomainSample s;
  s.box_lo = {-1.0, -1.0};
  s.box_hi = {1.0, 1.0};
  s.density = {3, 3};
  s.disturbance_samples = {{0.0}};
  CHECK_THROWS_AS(certkit::certify(sys, bundle, TheoremId::THM3_IOS, s),
                  MissingBundleField);
}

TEST_CASE("rectified auxiliaries take hand-computed values") {
  auto bundle = builtin::example1_bundle();
  bundle.r = 1.0;
  auto below = certkit::rectified_u_below_r(bundle);
  CHECK(below(Vec{0.0, 0.0}) == 0.5);   // W = 0: 0.5 * r^2
  CHECK(below(Vec{0.0, 2.0}) == 0.0);   // W = 4 >= r
  auto above = certkit::rectified_u_above_chi(bundle, 0.25);
  CHECK(above(Vec{0.0, 1.0}) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(above(Vec{0.0, 0.1}) == 0.0);

  std::vector<Vec> pts = {{0.3, 0.4}, {0.2, 1.3}, {-1.1, 0.8}};
  CHECK(dynsys::gradient_check(below, pts).max_rel_error < 1e-6);
  CHECK(dynsys::gradient_check(above, pts).max_rel_error < 1e-6);
}

TEST_CASE("verification is deterministic across thread counts") {
  auto sys = builtin::example1();
  auto bundle = builtin::example1_bundle();
  bundle.rho = rates::RateFunction::identity();
  DomainSample s;
  s.box_lo = {-2.0, -2.0};
  s.box_hi = {2.0, 2.0};
  s.density = {9, 9};
  s.disturbance_samples = sys.disturbance_set.grid(3);
  auto v1 = certkit::certify(sys, bundle, TheoremId::THM3_IOS, s, 1);
  auto v2 = certkit::certify(sys, bundle, TheoremId::THM3_IOS, s, 3);
  CHECK(io::dump_json_17(io::to_json(v1)) == io::dump_json_17(io::to_json(v2)));
}

#include "outstab/builtin.hpp"

#include <cmath>

namespace outstab::builtin {

dynsys::DynamicalSystem example1(double d_max) {
  dynsys::DynamicalSystem sys;
  sys.dim_state = 2;
  sys.dim_disturbance = 1;
  sys.dim_output = 1;
  sys.disturbance_set = dynsys::DomainSpec::ball(1, d_max);
  sys.equilibrium_under_all_d = false;
  sys.field = [](std::span<const double> x, std::span<const double> d, std::span<double> dx) {
    dx[0] = x[0] / (1.0 + std::abs(x[0]));
    dx[1] = (-x[1] + (d.empty() ? 0.0 : d[0])) / std::sqrt(1.0 + x[0] * x[0]);
  };
  sys.output = [](std::span<const double> x, std::span<double> y) { y[0] = x[1]; };
  return sys;
}

certkit::CertificateBundle example1_bundle() {
  certkit::CertificateBundle b;
  b.V.dim = 2;
  b.V.value = [](std::span<const double> x) {
    return 0.5 * x[1] * x[1] * std::sqrt(1.0 + x[0] * x[0]);
  };
  b.V.gradient = [](std::span<const double> x, std::span<double> g) {
    double s = std::sqrt(1.0 + x[0] * x[0]);
    g[0] = x[0] * x[1] * x[1] / (2.0 * s);
    g[1] = x[1] * s;
  };
  b.W.dim = 2;
  b.W.value = [](std::span<const double> x) { return x[1] * x[1]; };
  b.W.gradient = [](std::span<const double> x, std::span<double> g) {
    g[0] = 0.0;
    g[1] = 2.0 * x[1];
  };
  b.a = rates::RateFunction::power(1.0, 2.0);
  b.chi = rates::RateFunction::power(8.0, 2.0);
  b.rho = rates::RateFunction::linear(1.0 / 8.0);
  return b;
}

std::vector<SystemInfo> catalog() {
  std::vector<SystemInfo> out;
  SystemInfo ex1;
  ex1.id = "example1";
  ex1.dim_state = 2;
  ex1.dim_disturbance = 1;
  ex1.dim_output = 1;
  ex1.description =
      "planar system with an unbounded drift state and a disturbed, slowing output channel";
  ex1.params = {{"d_max", "radius of the disturbance ball"}};
  out.push_back(ex1);

  SystemInfo dads;
  dads.id = "dads";
  dads.dim_state = 2;
  dads.dim_disturbance = 1;
  dads.dim_output = 1;
  dads.description =
      "scalar plant with deadzone-adaptive feedback; state (y, z), output clipped to the band";
  dads.params = {{"theta", "unknown plant gain"},
                 {"Gamma", "adaptation rate"},
                 {"eps_dz", "deadzone width"},
                 {"c", "nominal feedback gain"},
                 {"a", "damping weight"}};
  out.push_back(dads);
  return out;
}

}  // namespace outstab::builtin

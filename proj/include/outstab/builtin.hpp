#pragma once

#include <string>
#include <utility>
#include <vector>

#include "outstab/certkit.hpp"
#include "outstab/dynsys.hpp"

namespace outstab::builtin {

// Planar system with unbounded first state and disturbance entering the
// second: x1' = x1 / (1 + |x1|), x2' = (-x2 + d) / sqrt(1 + x1^2), y = x2.
dynsys::DynamicalSystem example1(double d_max = 1.0);

// Certificates for example1: V = x2^2 sqrt(1 + x1^2) / 2, W = x2^2,
// a(s) = s^2, chi(s) = 8 s^2, rho(s) = s / 8.
certkit::CertificateBundle example1_bundle();

struct SystemInfo {
  std::string id;
  int dim_state = 0;
  int dim_disturbance = 0;
  int dim_output = 0;
  std::string description;
  std::vector<std::pair<std::string, std::string>> params;  // name -> meaning
};

std::vector<SystemInfo> catalog();

}  // namespace outstab::builtin

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "outstab/dynsys.hpp"
#include "outstab/rates.hpp"

namespace outstab::certkit {

using dynsys::ScalarField;
using dynsys::Vec;

// Candidate certificate for one of the supported stability theorems. V and W
// must carry gradients; Q, chi, gamma, zeta are needed only by some theorems.
struct CertificateBundle {
  ScalarField V;
  ScalarField W;
  std::optional<ScalarField> Q;
  rates::RateFunction rho;
  rates::RateFunction a;
  std::optional<rates::RateFunction> chi;
  std::optional<rates::RateFunction> gamma;
  std::optional<rates::RateFunction> zeta;
  double r = 1.0;  // threshold for the small-W conditions
};

enum class TheoremId {
  LAGRANGE,
  LYAP_LOCAL,
  THM1_CASE_I,
  THM1_CASE_II,
  THM2_I,
  THM2_II,
  THM3_IOS,
};

std::string to_string(TheoremId id);
TheoremId theorem_from_string(const std::string& s);

struct DomainSample {
  Vec box_lo, box_hi;
  std::vector<int> density;  // points per axis, each >= 2
  std::vector<Vec> disturbance_samples;
  int refinement = 4;        // local density multiplier around violations
  double slack_abs = 1e-9;
  double slack_rel = 0.0;

  std::size_t state_count() const;
  Vec state_point(std::size_t index) const;
  Vec spacing() const;
};

struct Violation {
  Vec x, d;
  double lhs = 0.0, rhs = 0.0;
  double margin = 0.0;  // lhs - rhs, positive
  std::string condition;
  bool refined = false;
};

struct TailCondition {
  std::string kind = "none";  // "none" | "liminf" | "zeta_domination"
  bool satisfied = true;
  double window_lo = 0.0, window_hi = 0.0;
  double min_value = 0.0;
  std::string note;
};

struct Verdict {
  TheoremId theorem_id = TheoremId::THM3_IOS;
  bool passed = false;
  std::vector<Violation> violations;
  long checked_points = 0;  // (x, d) pairs examined, summed over condition checks
  TailCondition tail_condition;
  Vec box_lo, box_hi;
  std::vector<int> density;
};

using PointPredicate = std::function<bool(std::span<const double>, std::span<const double>)>;
using PointEval = std::function<double(std::span<const double>, std::span<const double>)>;

struct ImplicationResult {
  std::vector<Violation> violations;
  long checked = 0;
};

// Scans the sample grid for points where antecedent holds and
// lhs > rhs + slack. One refinement pass (denser local grid) runs around the
// first violations found. Throws NonFiniteValue on NaN or infinity.
ImplicationResult check_implication(const PointPredicate& antecedent, const PointEval& lhs,
                                    const PointEval& rhs, const DomainSample& sample,
                                    const std::string& name = "", int jobs = 0);

// Checks every pointwise condition of the selected theorem on the sample and
// evaluates its tail condition. Throws MissingBundleField when the theorem
// needs an absent bundle entry.
Verdict certify(const dynsys::DynamicalSystem& sys, const CertificateBundle& bundle,
                TheoremId theorem, const DomainSample& sample, int jobs = 0);

// 0.5 * ((r - W)^+)^2 with gradient -(r - W)^+ grad W.
ScalarField rectified_u_below_r(const CertificateBundle& bundle);

// 0.5 * ((W - chi(s))^+)^2 with gradient (W - chi(s))^+ grad W.
ScalarField rectified_u_above_chi(const CertificateBundle& bundle, double s);

}  // namespace outstab::certkit

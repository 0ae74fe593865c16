#pragma once

#include <random>
#include <span>
#include <vector>

#include "outstab/fields.hpp"

namespace outstab::dynsys {

enum class DomainKind { box, ball, finite_set, singleton_zero };

// Compact disturbance value set.
class DomainSpec {
 public:
  DomainSpec() : kind_(DomainKind::singleton_zero), dim_(0) {}

  static DomainSpec box(Vec lo, Vec hi);
  static DomainSpec ball(int dim, double radius);
  static DomainSpec finite_set(std::vector<Vec> points);
  static DomainSpec singleton_zero(int dim);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double radius() const { return radius_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const std::vector<Vec>& points() const { return points_; }

  bool contains(std::span<const double> p, double tol = 1e-12) const;

  // Deterministic covering sample: tensor grid for boxes (per_axis points per
  // axis), box grid filtered by norm for balls, the point list for finite
  // sets, {0} for the singleton.
  std::vector<Vec> grid(int per_axis) const;

  Vec sample(std::mt19937_64& rng) const;

 private:
  DomainKind kind_;
  int dim_;
  double radius_ = 0.0;
  Vec lo_, hi_;
  std::vector<Vec> points_;
};

}  // namespace outstab::dynsys

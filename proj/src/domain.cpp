#include "outstab/domain.hpp"

#include <cmath>
#include <stdexcept>

namespace outstab::dynsys {

namespace {

double norm2(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return std::sqrt(s);
}

}  // namespace

DomainSpec DomainSpec::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("box bounds size mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("box has lo > hi");
  DomainSpec d;
  d.kind_ = DomainKind::box;
  d.dim_ = static_cast<int>(lo.size());
  d.lo_ = std::move(lo);
  d.hi_ = std::move(hi);
  return d;
}

DomainSpec DomainSpec::ball(int dim, double radius) {
  if (dim < 0 || !(radius >= 0.0)) throw std::invalid_argument("bad ball parameters");
  DomainSpec d;
  d.kind_ = DomainKind::ball;
  d.dim_ = dim;
  d.radius_ = radius;
  return d;
}

DomainSpec DomainSpec::finite_set(std::vector<Vec> points) {
  if (points.empty()) throw std::invalid_argument("finite set needs at least one point");
  DomainSpec d;
  d.kind_ = DomainKind::finite_set;
  d.dim_ = static_cast<int>(points[0].size());
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != d.dim_)
      throw std::invalid_argument("finite set points have mixed dimensions");
  d.points_ = std::move(points);
  return d;
}

DomainSpec DomainSpec::singleton_zero(int dim) {
  if (dim < 0) throw std::invalid_argument("negative dimension");
  DomainSpec d;
  d.kind_ = DomainKind::singleton_zero;
  d.dim_ = dim;
  return d;
}

bool DomainSpec::contains(std::span<const double> p, double tol) const {
  if (static_cast<int>(p.size()) != dim_) return false;
  switch (kind_) {
    case DomainKind::box:
      for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] < lo_[i] - tol || p[i] > hi_[i] + tol) return false;
      return true;
    case DomainKind::ball:
      return norm2(p) <= radius_ + tol;
    case DomainKind::finite_set: {
      for (const auto& q : points_) {
        double dmax = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) dmax = std::max(dmax, std::abs(p[i] - q[i]));
        if (dmax <= tol) return true;
      }
      return false;
    }
    case DomainKind::singleton_zero:
      for (double v : p)
        if (std::abs(v) > tol) return false;
      return true;
  }
  return false;
}

std::vector<Vec> DomainSpec::grid(int per_axis) const {
  if (dim_ == 0) return {Vec{}};
  switch (kind_) {
    case DomainKind::finite_set:
      return points_;
    case DomainKind::singleton_zero:
      return {Vec(static_cast<std::size_t>(dim_), 0.0)};
    case DomainKind::box:
    case DomainKind::ball: {
      if (per_axis < 2) throw std::invalid_argument("grid needs >= 2 points per axis");
      Vec lo = lo_, hi = hi_;
      if (kind_ == DomainKind::ball) {
        lo.assign(static_cast<std::size_t>(dim_), -radius_);
        hi.assign(static_cast<std::size_t>(dim_), radius_);
      }
      std::vector<Vec> out;
      std::vector<int> idx(static_cast<std::size_t>(dim_), 0);
      const auto n = static_cast<std::size_t>(dim_);
      while (true) {
        Vec p(n);
        for (std::size_t i = 0; i < n; ++i)
          p[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (per_axis - 1);
        if (kind_ != DomainKind::ball || norm2(p) <= radius_ + 1e-12) out.push_back(std::move(p));
        std::size_t axis = 0;
        while (axis < n && ++idx[axis] == per_axis) idx[axis++] = 0;
        if (axis == n) break;
      }
      return out;
    }
  }
  return {};
}

Vec DomainSpec::sample(std::mt19937_64& rng) const {
  const auto n = static_cast<std::size_t>(dim_);
  switch (kind_) {
    case DomainKind::singleton_zero:
      return Vec(n, 0.0);
    case DomainKind::finite_set: {
      std::uniform_int_distribution<std::size_t> pick(0, points_.size() - 1);
      return points_[pick(rng)];
    }
    case DomainKind::box: {
      Vec p(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::uniform_real_distribution<double> u(lo_[i], hi_[i]);
        p[i] = u(rng);
      }
      return p;
    }
    case DomainKind::ball: {
      if (radius_ == 0.0 || n == 0) return Vec(n, 0.0);
      std::uniform_real_distribution<double> u(-radius_, radius_);
      while (true) {
        Vec p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = u(rng);
        if (norm2(p) <= radius_) return p;
      }
    }
  }
  return Vec(n, 0.0);
}

}  // namespace outstab::dynsys

#include "outstab/certkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "outstab/errors.hpp"
#include "outstab/parallel.hpp"

namespace outstab::certkit {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void validate_sample(const DomainSample& sample) {
  const std::size_t n = sample.box_lo.size();
  if (n == 0 || sample.box_hi.size() != n || sample.density.size() != n)
    throw std::invalid_argument("sample box and density sizes disagree");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sample.box_hi[i] >= sample.box_lo[i]))
      throw std::invalid_argument("sample box is inverted");
    if (sample.density[i] < 2) throw std::invalid_argument("grid density must be at least 2");
  }
  if (sample.refinement < 1) throw std::invalid_argument("refinement must be at least 1");
}

}  // namespace

std::string to_string(TheoremId id) {
  switch (id) {
    case TheoremId::LAGRANGE: return "lagrange";
    case TheoremId::LYAP_LOCAL: return "lyap_local";
    case TheoremId::THM1_CASE_I: return "thm1_case_i";
    case TheoremId::THM1_CASE_II: return "thm1_case_ii";
    case TheoremId::THM2_I: return "thm2_i";
    case TheoremId::THM2_II: return "thm2_ii";
    case TheoremId::THM3_IOS: return "thm3_ios";
  }
  throw std::invalid_argument("unknown theorem id");
}

TheoremId theorem_from_string(const std::string& s) {
  if (s == "lagrange") return TheoremId::LAGRANGE;
  if (s == "lyap_local") return TheoremId::LYAP_LOCAL;
  if (s == "thm1_case_i") return TheoremId::THM1_CASE_I;
  if (s == "thm1_case_ii") return TheoremId::THM1_CASE_II;
  if (s == "thm2_i") return TheoremId::THM2_I;
  if (s == "thm2_ii") return TheoremId::THM2_II;
  if (s == "thm3_ios") return TheoremId::THM3_IOS;
  throw std::invalid_argument("unknown theorem name: " + s);
}

std::size_t DomainSample::state_count() const {
  std::size_t n = 1;
  for (int d : density) n *= static_cast<std::size_t>(d);
  return n;
}

Vec DomainSample::state_point(std::size_t index) const {
  Vec p(box_lo.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto di = static_cast<std::size_t>(density[i]);
    std::size_t k = index % di;
    index /= di;
    p[i] = box_lo[i] + (box_hi[i] - box_lo[i]) * static_cast<double>(k) /
                           static_cast<double>(di - 1);
  }
  return p;
}

Vec DomainSample::spacing() const {
  Vec s(box_lo.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = (box_hi[i] - box_lo[i]) / (density[i] - 1);
  return s;
}

ImplicationResult check_implication(const PointPredicate& antecedent, const PointEval& lhs,
                                    const PointEval& rhs, const DomainSample& sample,
                                    const std::string& name, int jobs) {
  validate_sample(sample);
  std::vector<Vec> dists = sample.disturbance_samples;
  if (dists.empty()) dists.emplace_back();

  struct Hit {
    std::size_t point, dist;
    Violation v;
  };
  std::mutex mu;
  std::vector<Hit> hits;

  auto try_point = [&](const Vec& x, std::size_t point_idx, bool refined,
                       std::vector<Hit>& local) {
    for (std::size_t j = 0; j < dists.size(); ++j) {
      const Vec& d = dists[j];
      if (!antecedent(x, d)) continue;
      double l = lhs(x, d), r = rhs(x, d);
      if (!std::isfinite(l) || !std::isfinite(r))
        throw NonFiniteValue("condition evaluator produced NaN or infinity: " + name);
      double slack = sample.slack_abs + sample.slack_rel * std::max(std::abs(l), std::abs(r));
      if (l > r + slack) {
        Violation v;
        v.x = x;
        v.d = d;
        v.lhs = l;
        v.rhs = r;
        v.margin = l - r;
        v.condition = name;
        v.refined = refined;
        local.push_back(Hit{point_idx, j, std::move(v)});
      }
    }
  };

  const std::size_t total = sample.state_count();
  parallel_for(
      total,
      [&](std::size_t idx) {
        std::vector<Hit> local;
        try_point(sample.state_point(idx), idx, false, local);
        if (!local.empty()) {
          std::lock_guard<std::mutex> lk(mu);
          for (auto& h : local) hits.push_back(std::move(h));
        }
      },
      jobs);
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return a.point != b.point ? a.point < b.point : a.dist < b.dist;
  });

  // One refinement pass: scan a denser sub-grid inside the cells around the
  // first few violating points.
  const Vec h = sample.spacing();
  const std::size_t n_base = hits.size();
  const std::size_t refine_cap = std::min<std::size_t>(n_base, 8);
  const int sub = 2 * sample.refinement + 1;
  for (std::size_t v = 0; v < refine_cap; ++v) {
    const Vec& cx = hits[v].v.x;
    std::vector<int> idx(cx.size(), 0);
    std::vector<Hit> local;
    while (true) {
      Vec p(cx.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        double lo = std::max(sample.box_lo[i], cx[i] - h[i]);
        double hi = std::min(sample.box_hi[i], cx[i] + h[i]);
        p[i] = lo + (hi - lo) * idx[i] / (sub - 1);
      }
      try_point(p, hits[v].point, true, local);
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == sub) idx[k++] = 0;
      if (k == idx.size()) break;
    }
    for (auto& hit : local) hits.push_back(std::move(hit));
  }

  ImplicationResult out;
  out.checked = static_cast<long>(total * dists.size());
  out.violations.reserve(hits.size());
  for (auto& hit : hits) out.violations.push_back(std::move(hit.v));
  return out;
}

namespace {

struct Evaluators {
  const dynsys::DynamicalSystem* sys;
  const CertificateBundle* bundle;

  double wdot(std::span<const double> x, std::span<const double> d) const {
    Vec fx(x.size());
    sys->field(x, d, fx);
    Vec g = bundle->W.grad(x);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * fx[i];
    return s;
  }
  double vdot(std::span<const double> x, std::span<const double> d) const {
    Vec fx(x.size());
    sys->field(x, d, fx);
    Vec g = bundle->V.grad(x);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * fx[i];
    return s;
  }
  double qdot(std::span<const double> x, std::span<const double> d) const {
    Vec fx(x.size());
    sys->field(x, d, fx);
    Vec g = bundle->Q->grad(x);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * fx[i];
    return s;
  }
  double out_norm(std::span<const double> x) const { return norm2(sys->out(x)); }
};

DomainSample d_free(const DomainSample& sample, int dim_d) {
  DomainSample s = sample;
  s.disturbance_samples = {Vec(static_cast<std::size_t>(dim_d), 0.0)};
  return s;
}

void require(bool ok, const char* what) {
  if (!ok) throw MissingBundleField(what);
}

}  // namespace

Verdict certify(const dynsys::DynamicalSystem& sys, const CertificateBundle& bundle,
                TheoremId theorem, const DomainSample& sample, int jobs) {
  validate_sample(sample);
  if (sample.box_lo.size() != static_cast<std::size_t>(sys.dim_state))
    throw std::invalid_argument("sample box dimension does not match the state dimension");

  Verdict verdict;
  verdict.theorem_id = theorem;
  verdict.box_lo = sample.box_lo;
  verdict.box_hi = sample.box_hi;
  verdict.density = sample.density;

  const bool uses_W = theorem != TheoremId::LAGRANGE;
  if (uses_W) {
    require(bundle.W.has_gradient(), "W gradient");
    Vec origin(static_cast<std::size_t>(sys.dim_state), 0.0);
    if (std::abs(bundle.W(origin)) > 1e-9)
      throw std::invalid_argument("W must vanish at the origin");
  }

  Evaluators ev{&sys, &bundle};
  auto always = [](std::span<const double>, std::span<const double>) { return true; };
  auto small_W = [&](std::span<const double> x, std::span<const double>) {
    return bundle.W(x) < bundle.r;
  };
  auto a_of_out = [&](std::span<const double> x, std::span<const double>) {
    return bundle.a(ev.out_norm(x));
  };
  auto W_of = [&](std::span<const double> x, std::span<const double>) { return bundle.W(x); };
  auto zero = [](std::span<const double>, std::span<const double>) { return 0.0; };

  auto run = [&](const PointPredicate& ante, const PointEval& lhs, const PointEval& rhs,
                 const DomainSample& smp, const char* name) {
    auto res = check_implication(ante, lhs, rhs, smp, name, jobs);
    verdict.checked_points += res.checked;
    for (auto& v : res.violations) verdict.violations.push_back(std::move(v));
  };

  auto decay_condition = [&] {
    if (!bundle.rho.flags().positive_definite)
      throw std::invalid_argument("rho must be flagged positive definite");
    require(bundle.V.has_gradient(), "V gradient");
    run(
        always, [&](auto x, auto d) { return ev.vdot(x, d); },
        [&](auto x, auto) { return -bundle.rho(bundle.W(x)); }, sample, "decay");
  };
  auto small_W_conditions = [&] {
    if (!bundle.a.flags().class_k)
      throw std::invalid_argument("a must be flagged class K");
    DomainSample df = d_free(sample, sys.dim_disturbance);
    run(small_W, a_of_out, W_of, df, "output_bound");
    run(
        small_W, [&](auto x, auto d) { return ev.wdot(x, d); }, zero, sample, "w_nonincrease");
  };
  auto zeta_domination = [&](const char* name) {
    require(bundle.Q.has_value(), "Q");
    require(bundle.zeta.has_value(), "zeta");
    DomainSample df = d_free(sample, sys.dim_disturbance);
    run(
        always, W_of, [&](auto x, auto) { return (*bundle.zeta)(bundle.Q.value()(x)); }, df,
        name);
  };
  auto q_nonincrease = [&] {
    require(bundle.Q.has_value(), "Q");
    require(bundle.Q->has_gradient(), "Q gradient");
    run(
        always, [&](auto x, auto d) { return ev.qdot(x, d); }, zero, sample, "q_nonincrease");
  };

  auto liminf_tail = [&] {
    TailCondition tc;
    tc.kind = "liminf";
    double s_max = 0.0;
    for (std::size_t i = 0; i < sample.state_count(); ++i)
      s_max = std::max(s_max, bundle.W(sample.state_point(i)));
    tc.window_lo = s_max;
    tc.window_hi = 10.0 * s_max;
    double m = bundle.rho(tc.window_lo);
    for (int i = 1; i < 10001; ++i)
      m = std::min(m, bundle.rho(tc.window_lo + (tc.window_hi - tc.window_lo) * i / 10000.0));
    tc.min_value = m;
    if (bundle.rho.flags().tail_positive) {
      tc.satisfied = true;
      tc.note = "declared tail-positive";
    } else {
      tc.satisfied = m > 1e-12;
      tc.note = tc.satisfied ? "sampled tail minimum is positive"
                             : "sampled tail minimum is numerically zero";
    }
    verdict.tail_condition = tc;
  };
  auto domination_tail = [&](const char* name) {
    zeta_domination(name);
    TailCondition tc;
    tc.kind = "zeta_domination";
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sample.state_count(); ++i) {
      Vec x = sample.state_point(i);
      margin = std::min(margin, (*bundle.zeta)(bundle.Q.value()(x)) - bundle.W(x));
    }
    tc.min_value = margin;
    tc.satisfied = std::none_of(verdict.violations.begin(), verdict.violations.end(),
                                [&](const Violation& v) { return v.condition == name; });
    tc.note = tc.satisfied ? "W is dominated on the sampled box"
                           : "domination fails at reported points";
    verdict.tail_condition = tc;
  };

  switch (theorem) {
    case TheoremId::LAGRANGE: {
      if (!bundle.a.flags().class_k_inf)
        throw std::invalid_argument("a must be flagged class K-infinity");
      require(bundle.Q.has_value(), "Q");
      require(bundle.Q->has_gradient(), "Q gradient");
      DomainSample df = d_free(sample, sys.dim_disturbance);
      run(
          always, a_of_out, [&](auto x, auto) { return bundle.Q.value()(x); }, df,
          "output_bound");
      q_nonincrease();
      break;
    }
    case TheoremId::LYAP_LOCAL:
      small_W_conditions();
      break;
    case TheoremId::THM1_CASE_I:
      decay_condition();
      small_W_conditions();
      liminf_tail();
      break;
    case TheoremId::THM1_CASE_II:
      decay_condition();
      small_W_conditions();
      q_nonincrease();
      domination_tail("zeta_domination");
      break;
    case TheoremId::THM2_I:
    case TheoremId::THM2_II: {
      require(bundle.gamma.has_value(), "gamma");
      require(bundle.Q.has_value(), "Q");
      decay_condition();
      q_nonincrease();
      DomainSample df = d_free(sample, sys.dim_disturbance);
      if (!bundle.a.flags().class_k)
        throw std::invalid_argument("a must be flagged class K");
      run(small_W, a_of_out, W_of, df, "output_bound");
      auto gamma_Q = [&](std::span<const double> x, std::span<const double>) {
        return (*bundle.gamma)(bundle.Q.value()(x));
      };
      if (theorem == TheoremId::THM2_I) {
        run(
            small_W, [&](auto x, auto d) { return ev.wdot(x, d); }, gamma_Q, sample,
            "growth_bound_upper");
      } else {
        // lhs -Wdot <= gamma(Q) encodes Wdot >= -gamma(Q).
        run(
            always, [&](auto x, auto d) { return -ev.wdot(x, d); }, gamma_Q, sample,
            "growth_bound_lower");
      }
      if (bundle.zeta.has_value())
        domination_tail("zeta_domination");
      else
        liminf_tail();
      break;
    }
    case TheoremId::THM3_IOS: {
      if (!bundle.a.flags().class_k_inf)
        throw std::invalid_argument("a must be flagged class K-infinity");
      if (!bundle.rho.flags().positive_definite)
        throw std::invalid_argument("rho must be flagged positive definite");
      require(bundle.chi.has_value(), "chi");
      require(bundle.V.has_gradient(), "V gradient");
      auto excited = [&](std::span<const double> x, std::span<const double> d) {
        return bundle.W(x) >= (*bundle.chi)(norm2(d));
      };
      DomainSample df = d_free(sample, sys.dim_disturbance);
      run(always, a_of_out, W_of, df, "output_bound");
      run(
          excited, [&](auto x, auto d) { return ev.vdot(x, d); },
          [&](auto x, auto) { return -bundle.rho(bundle.W(x)); }, sample, "excited_decay");
      run(
          excited, [&](auto x, auto d) { return ev.wdot(x, d); }, zero, sample,
          "excited_w_nonincrease");
      break;
    }
  }

  verdict.passed = verdict.violations.empty() && verdict.tail_condition.satisfied;
  return verdict;
}

ScalarField rectified_u_below_r(const CertificateBundle& bundle) {
  require(bundle.W.has_gradient(), "W gradient");
  ScalarField u;
  u.dim = bundle.W.dim;
  const ScalarField W = bundle.W;
  const double r = bundle.r;
  u.value = [W, r](std::span<const double> x) {
    double gap = std::max(0.0, r - W(x));
    return 0.5 * gap * gap;
  };
  u.gradient = [W, r](std::span<const double> x, std::span<double> g) {
    double gap = std::max(0.0, r - W(x));
    Vec gw = W.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = -gap * gw[i];
  };
  return u;
}

ScalarField rectified_u_above_chi(const CertificateBundle& bundle, double s) {
  require(bundle.chi.has_value(), "chi");
  require(bundle.W.has_gradient(), "W gradient");
  if (!(s >= 0.0)) throw std::invalid_argument("signal magnitude must be nonnegative");
  ScalarField u;
  u.dim = bundle.W.dim;
  const ScalarField W = bundle.W;
  const double level = (*bundle.chi)(s);
  u.value = [W, level](std::span<const double> x) {
    double gap = std::max(0.0, W(x) - level);
    return 0.5 * gap * gap;
  };
  u.gradient = [W, level](std::span<const double> x, std::span<double> g) {
    double gap = std::max(0.0, W(x) - level);
    Vec gw = W.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = gap * gw[i];
  };
  return u;
}

}  // namespace outstab::certkit

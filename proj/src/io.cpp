#include "outstab/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string_view>

namespace outstab::io {

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void dump_rec(const json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad;
        out += json(it.key()).dump();
        out += ": ";
        dump_rec(it.value(), out, indent, depth + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += close_pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad;
        dump_rec(j[i], out, indent, depth + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += close_pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += fmt(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

json signal_to_json(const dynsys::DisturbanceSignal& s) {
  json j;
  j["kind"] = dynsys::to_string(s.kind());
  j["dim"] = s.dim();
  j["sup_norm"] = s.sup_norm();
  std::vector<double> times{0.0};
  for (double b : s.breakpoints()) times.push_back(b);
  j["times"] = times;
  json levels = json::array();
  std::vector<double> buf(static_cast<std::size_t>(s.dim()));
  for (double t : times) {
    s.eval(t, buf);
    levels.push_back(buf);
  }
  j["levels"] = levels;
  return j;
}

json witness_to_json(const probes::QucWitness& w) {
  return json{{"t0", w.t0},
              {"t1", w.t1},
              {"increment", w.increment},
              {"eps", w.eps},
              {"delta", w.delta}};
}

}  // namespace

std::string dump_json_17(const json& j, int indent) {
  std::string out;
  dump_rec(j, out, indent, 0);
  out += "\n";
  return out;
}

void write_json_17(const json& j, std::ostream& os, int indent) {
  os << dump_json_17(j, indent);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const json& j) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(dump_json_17(j))));
  return buf;
}

void trajectory_csv(const dynsys::Trajectory& traj, std::ostream& os) {
  os << "t";
  for (int i = 1; i <= traj.dim_state(); ++i) os << ",x" << i;
  for (int i = 1; i <= traj.dim_output(); ++i) os << ",y" << i;
  os << "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << fmt(traj.times[i]);
    for (double v : traj.states[i]) os << "," << fmt(v);
    for (double v : traj.outputs[i]) os << "," << fmt(v);
    os << "\n";
  }
}

json trajectory_json(const dynsys::Trajectory& traj) {
  json j;
  j["times"] = traj.times;
  j["states"] = traj.states;
  j["outputs"] = traj.outputs;
  j["step_stats"] = {{"accepted", traj.step_stats.accepted},
                     {"rejected", traj.step_stats.rejected},
                     {"max_error_rate", traj.step_stats.max_error_rate},
                     {"min_step", traj.step_stats.min_step},
                     {"kink_capped", traj.step_stats.kink_capped}};
  return j;
}

json to_json(const certkit::Verdict& v) {
  json j;
  j["theorem"] = certkit::to_string(v.theorem_id);
  j["passed"] = v.passed;
  j["checked_points"] = v.checked_points;
  json viols = json::array();
  for (const auto& vi : v.violations)
    viols.push_back(json{{"x", vi.x},
                         {"d", vi.d},
                         {"lhs", vi.lhs},
                         {"rhs", vi.rhs},
                         {"margin", vi.margin},
                         {"condition", vi.condition},
                         {"refined", vi.refined}});
  j["violations"] = viols;
  j["tail_condition"] = {{"kind", v.tail_condition.kind},
                         {"satisfied", v.tail_condition.satisfied},
                         {"window_lo", v.tail_condition.window_lo},
                         {"window_hi", v.tail_condition.window_hi},
                         {"min_value", v.tail_condition.min_value},
                         {"note", v.tail_condition.note}};
  j["box_lo"] = v.box_lo;
  j["box_hi"] = v.box_hi;
  j["density"] = v.density;
  return j;
}

json to_json(const rates::ConvergenceBound& b) {
  return json{{"epsilon", b.epsilon},   {"R", b.R}, {"rho_floor", b.rho_floor},
              {"v_max", b.v_max},       {"T", b.T}, {"grid", b.grid_density}};
}

json to_json(const probes::UniformityReport& r) {
  json j;
  j["notion"] = r.notion;
  j["n_trajectories"] = r.n_trajectories;
  j["R"] = r.R;
  j["epsilon"] = r.epsilon;
  j["horizon"] = r.horizon;
  j["sup_attainment"] = r.sup_attainment;
  j["not_attained"] = r.not_attained;
  j["max_overshoot"] = r.max_overshoot;
  j["tail_max"] = r.tail_max;
  j["theory_T"] = r.theory_T.has_value() ? json(*r.theory_T) : json(nullptr);
  j["within_theory"] = r.within_theory;
  j["attainment_times"] = r.attainment_times;
  return j;
}

json to_json(const probes::QucReport& r) {
  json j;
  j["quc"] = r.quc;
  json pe = json::array();
  for (const auto& e : r.per_eps) {
    json je{{"eps", e.eps}, {"holds", e.holds}, {"best_delta", e.best_delta}};
    je["witness"] = e.witness.has_value() ? witness_to_json(*e.witness) : json(nullptr);
    pe.push_back(je);
  }
  j["per_eps"] = pe;
  j["witness"] = r.witness.has_value() ? witness_to_json(*r.witness) : json(nullptr);
  return j;
}

json to_json(const probes::BarbalatReport& r) {
  return json{{"integral", r.integral},
              {"tail_integral", r.tail_integral},
              {"tail_sup", r.tail_sup},
              {"tail_window_start", r.tail_window_start},
              {"integral_converged", r.integral_converged},
              {"quc", r.quc},
              {"rho_positive_definite", r.rho_positive_definite},
              {"consistent", r.consistent}};
}

json to_json(const probes::KLEnvelope& e) {
  return json{{"s_knots", e.s_knots}, {"t_knots", e.t_knots}, {"values", e.values}};
}

json to_json(const probes::FalsifyWitness& w) {
  json j;
  j["x0"] = w.x0;
  j["signal"] = signal_to_json(w.signal);
  j["objective"] = w.objective;
  j["not_attained"] = w.not_attained;
  j["trial"] = w.trial;
  return j;
}

json to_json(const dads::DadsPropertyReport& r) {
  const char* reg = "inconclusive";
  if (r.regulation_case == dads::RegulationCase::y_to_zero) reg = "y_to_zero";
  if (r.regulation_case == dads::RegulationCase::z_saturated_below_ln)
    reg = "z_saturated_below_ln";
  return json{{"pios_bound_ok", r.pios_bound_ok},
              {"z_monotone_ok", r.z_monotone_ok},
              {"z_bounded_ok", r.z_bounded_ok},
              {"asymptotic_gain_ok", r.asymptotic_gain_ok},
              {"regulation_case", reg},
              {"pios_margin", r.pios_margin},
              {"z_min_increment", r.z_min_increment},
              {"z_max", r.z_max},
              {"z_end", r.z_end},
              {"tail_half_y2_max", r.tail_half_y2_max},
              {"tail_abs_y_max", r.tail_abs_y_max},
              {"d_tail_max", r.d_tail_max},
              {"other_branch_estimate", r.other_branch_estimate},
              {"z_saturated", r.z_saturated},
              {"horizon", r.horizon},
              {"tail_start", r.tail_start}};
}

json to_json(const dads::ThetaThreshold& t) {
  json j;
  j["closed_form"] = t.closed_form.has_value() ? json(*t.closed_form) : json(nullptr);
  j["universal"] = t.universal;
  j["numeric"] = t.numeric;
  return j;
}

void kl_envelope_csv(const probes::KLEnvelope& e, std::ostream& os) {
  os << "s";
  for (double t : e.t_knots) os << ",t=" << fmt(t);
  os << "\n";
  for (std::size_t r = 0; r < e.s_knots.size(); ++r) {
    os << fmt(e.s_knots[r]);
    for (double v : e.values[r]) os << "," << fmt(v);
    os << "\n";
  }
}

void series_csv(const std::string& name, const std::vector<double>& t,
                const std::vector<double>& v, std::ostream& os) {
  os << "t," << name << "\n";
  for (std::size_t i = 0; i < t.size() && i < v.size(); ++i)
    os << fmt(t[i]) << "," << fmt(v[i]) << "\n";
}

}  // namespace outstab::io

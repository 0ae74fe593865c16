#include "outstab/shell.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "outstab/builtin.hpp"
#include "outstab/certkit.hpp"
#include "outstab/dads.hpp"
#include "outstab/dynsys.hpp"
#include "outstab/errors.hpp"
#include "outstab/io.hpp"
#include "outstab/probes.hpp"
#include "outstab/rates.hpp"

namespace outstab::shell {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("OUTSTAB_LOG");
    if (!env) return LogLevel::warn;
    const std::string s(env);
    if (s == "error") return LogLevel::error;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

void log(LogLevel level, const std::string& msg) {
  if (level > log_level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[outstab] %s: %s\n", names[static_cast<int>(level)], msg.c_str());
}

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw ConfigInvalid(path + ": " + why);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json* lookup(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(path.empty() ? "config" : path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known) bad(join(path, it.key()), "unknown key");
  }
}

double num_at(const json& obj, const std::string& path, const char* key,
              std::optional<double> fallback = std::nullopt) {
  const json* v = lookup(obj, key);
  if (!v) {
    if (!fallback) bad(join(path, key), "required number missing");
    return *fallback;
  }
  if (!v->is_number()) bad(join(path, key), "expected a number");
  return v->get<double>();
}

long long int_at(const json& obj, const std::string& path, const char* key,
                 std::optional<long long> fallback = std::nullopt) {
  const json* v = lookup(obj, key);
  if (!v) {
    if (!fallback) bad(join(path, key), "required integer missing");
    return *fallback;
  }
  if (!v->is_number_integer()) bad(join(path, key), "expected an integer");
  return v->get<long long>();
}

std::string str_at(const json& obj, const std::string& path, const char* key,
                   std::optional<std::string> fallback = std::nullopt) {
  const json* v = lookup(obj, key);
  if (!v) {
    if (!fallback) bad(join(path, key), "required string missing");
    return *fallback;
  }
  if (!v->is_string()) bad(join(path, key), "expected a string");
  return v->get<std::string>();
}

dynsys::Vec vec_at(const json& obj, const std::string& path, const char* key) {
  const json* v = lookup(obj, key);
  if (!v) bad(join(path, key), "required array missing");
  if (!v->is_array()) bad(join(path, key), "expected an array of numbers");
  dynsys::Vec out;
  out.reserve(v->size());
  for (const json& e : *v) {
    if (!e.is_number()) bad(join(path, key), "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<dynsys::Vec> vec_list_at(const json& obj, const std::string& path, const char* key) {
  const json* v = lookup(obj, key);
  if (!v) bad(join(path, key), "required array missing");
  if (!v->is_array()) bad(join(path, key), "expected an array of arrays");
  std::vector<dynsys::Vec> out;
  out.reserve(v->size());
  for (const json& row : *v) {
    if (!row.is_array()) bad(join(path, key), "expected an array of arrays");
    dynsys::Vec r;
    r.reserve(row.size());
    for (const json& e : row) {
      if (!e.is_number()) bad(join(path, key), "entries must be numbers");
      r.push_back(e.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

// --- section validators ------------------------------------------------

void check_signal(const json& s, const std::string& path) {
  if (!s.is_object()) bad(path, "expected an object");
  const std::string kind = str_at(s, path, "kind");
  if (kind == "zero") {
    expect_keys(s, path, {"kind"});
  } else if (kind == "constant") {
    expect_keys(s, path, {"kind", "value"});
    vec_at(s, path, "value");
  } else if (kind == "piecewise-constant") {
    expect_keys(s, path, {"kind", "times", "values"});
    vec_at(s, path, "times");
    vec_list_at(s, path, "values");
  } else if (kind == "sinusoid") {
    expect_keys(s, path, {"kind", "amplitude", "omega", "phase"});
    vec_at(s, path, "amplitude");
    num_at(s, path, "omega", 1.0);
    num_at(s, path, "phase", 0.0);
  } else if (kind == "decaying") {
    expect_keys(s, path, {"kind", "amplitude", "rate"});
    vec_at(s, path, "amplitude");
    if (!(num_at(s, path, "rate", 1.0) > 0.0)) bad(join(path, "rate"), "must be positive");
  } else if (kind == "random-steps") {
    expect_keys(s, path, {"kind", "n_steps", "span"});
    if (int_at(s, path, "n_steps") < 1) bad(join(path, "n_steps"), "must be at least 1");
    if (!(num_at(s, path, "span") > 0.0)) bad(join(path, "span"), "must be positive");
  } else {
    bad(join(path, "kind"), "unknown signal kind: " + kind);
  }
}

void check_params(const json& p, const std::string& path) {
  expect_keys(p, path, {"Gamma", "eps_dz", "c", "a", "theta", "phi"});
  if (!(num_at(p, path, "Gamma", 1.0) > 0.0)) bad(join(path, "Gamma"), "must be positive");
  if (!(num_at(p, path, "c", 1.0) > 0.0)) bad(join(path, "c"), "must be positive");
  if (!(num_at(p, path, "a", 1.0) > 0.0)) bad(join(path, "a"), "must be positive");
  if (num_at(p, path, "eps_dz", 0.0) < 0.0) bad(join(path, "eps_dz"), "must be nonnegative");
  num_at(p, path, "theta", 0.0);
  const std::string phi = str_at(p, path, "phi", std::string("one"));
  if (phi != "one" && phi != "linear" && phi != "quadratic")
    bad(join(path, "phi"), "expected \"one\", \"linear\" or \"quadratic\"");
}

void check_system(const json& s) {
  expect_keys(s, "system", {"id", "d_max", "params"});
  const std::string id = str_at(s, "system", "id");
  if (id != "example1" && id != "dads") bad("system.id", "unknown system: " + id);
  if (lookup(s, "d_max") && !(num_at(s, "system", "d_max") > 0.0))
    bad("system.d_max", "must be positive");
  if (const json* p = lookup(s, "params")) {
    if (id != "dads") bad("system.params", "only the dads system takes params");
    check_params(*p, "system.params");
  }
}

void check_certificate(const json& c) {
  expect_keys(c, "certificate", {"id", "r_probe", "lambda"});
  const std::string id = str_at(c, "certificate", "id");
  if (id != "example1_ios" && id != "dads" && id != "dads_ios")
    bad("certificate.id", "unknown certificate: " + id);
  if (lookup(c, "r_probe")) {
    if (id == "example1_ios") bad("certificate.r_probe", "not used by example1_ios");
    if (!(num_at(c, "certificate", "r_probe") > 0.0))
      bad("certificate.r_probe", "must be positive");
  }
  if (lookup(c, "lambda")) {
    if (id != "dads_ios") bad("certificate.lambda", "only dads_ios takes lambda");
    const double l = num_at(c, "certificate", "lambda");
    if (!(l > 0.0 && l < 1.0)) bad("certificate.lambda", "must lie in (0, 1)");
  }
}

void check_sample(const json& s) {
  expect_keys(s, "sample",
              {"box_lo", "box_hi", "density", "disturbance_density", "refinement", "slack"});
  const auto lo = vec_at(s, "sample", "box_lo");
  const auto hi = vec_at(s, "sample", "box_hi");
  if (lo.empty()) bad("sample.box_lo", "must not be empty");
  if (lo.size() != hi.size()) bad("sample.box_hi", "size differs from box_lo");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(hi[i] >= lo[i])) bad("sample.box_hi", "below box_lo");
  const json* d = lookup(s, "density");
  if (!d) bad("sample.density", "required integer or integer array missing");
  if (d->is_array()) {
    if (d->size() != lo.size()) bad("sample.density", "size differs from box_lo");
    for (const json& e : *d)
      if (!e.is_number_integer() || e.get<long long>() < 2)
        bad("sample.density", "entries must be integers of at least 2");
  } else if (!d->is_number_integer() || d->get<long long>() < 2) {
    bad("sample.density", "must be an integer of at least 2");
  }
  if (lookup(s, "disturbance_density") && int_at(s, "sample", "disturbance_density") < 2)
    bad("sample.disturbance_density", "must be at least 2");
  if (lookup(s, "refinement") && int_at(s, "sample", "refinement") < 1)
    bad("sample.refinement", "must be at least 1");
  if (lookup(s, "slack") && num_at(s, "sample", "slack") < 0.0)
    bad("sample.slack", "must be nonnegative");
}

void check_simulate(const json& s) {
  expect_keys(s, "simulate", {"x0", "horizon", "tol", "signal"});
  vec_at(s, "simulate", "x0");
  if (!(num_at(s, "simulate", "horizon") > 0.0)) bad("simulate.horizon", "must be positive");
  if (lookup(s, "tol")) {
    const double tol = num_at(s, "simulate", "tol");
    if (!(tol >= 1e-12 && tol <= 1e-2)) bad("simulate.tol", "must lie in [1e-12, 1e-2]");
  }
  if (const json* sg = lookup(s, "signal")) check_signal(*sg, "simulate.signal");
}

void check_certify(const json& c) {
  expect_keys(c, "certify", {"theorem"});
  const std::string name = str_at(c, "certify", "theorem");
  try {
    certkit::theorem_from_string(name);
  } catch (const std::exception& e) {
    bad("certify.theorem", e.what());
  }
}

void check_bound(const json& b) {
  expect_keys(b, "bound", {"kind", "epsilon", "R", "density"});
  const std::string kind = str_at(b, "bound", "kind");
  if (kind != "case_i" && kind != "case_ii" && kind != "ios_time")
    bad("bound.kind", "unknown kind: " + kind);
  if (!(num_at(b, "bound", "epsilon") > 0.0)) bad("bound.epsilon", "must be positive");
  if (!(num_at(b, "bound", "R") > 0.0)) bad("bound.R", "must be positive");
  if (lookup(b, "density") && int_at(b, "bound", "density") < 2)
    bad("bound.density", "must be at least 2");
}

void check_probe(const json& p) {
  expect_keys(p, "probe",
              {"kind", "epsilon", "R", "n_init", "horizon", "tol", "tail_fraction", "signals",
               "budget", "max_switches", "objective", "rho"});
  const std::string kind = str_at(p, "probe", "kind");
  auto reject = [&](std::initializer_list<const char*> keys) {
    for (const char* key : keys)
      if (lookup(p, key)) bad(join("probe", key), "not used by the " + kind + " probe");
  };
  auto check_tol = [&] {
    if (!lookup(p, "tol")) return;
    const double tol = num_at(p, "probe", "tol");
    if (!(tol >= 1e-12 && tol <= 1e-2)) bad("probe.tol", "must lie in [1e-12, 1e-2]");
  };
  auto check_tail = [&] {
    if (!lookup(p, "tail_fraction")) return;
    const double f = num_at(p, "probe", "tail_fraction");
    if (!(f > 0.0 && f < 1.0)) bad("probe.tail_fraction", "must lie in (0, 1)");
  };
  if (kind == "uniformity") {
    reject({"budget", "max_switches", "objective", "rho"});
    if (!(num_at(p, "probe", "epsilon") > 0.0)) bad("probe.epsilon", "must be positive");
    if (!(num_at(p, "probe", "R") > 0.0)) bad("probe.R", "must be positive");
    if (int_at(p, "probe", "n_init") < 1) bad("probe.n_init", "must be at least 1");
    if (!(num_at(p, "probe", "horizon") > 0.0)) bad("probe.horizon", "must be positive");
    const json* sigs = lookup(p, "signals");
    if (!sigs || !sigs->is_array() || sigs->empty())
      bad("probe.signals", "required nonempty array of signal specs");
    for (std::size_t i = 0; i < sigs->size(); ++i)
      check_signal((*sigs)[i], "probe.signals[" + std::to_string(i) + "]");
    check_tol();
    check_tail();
  } else if (kind == "falsify") {
    reject({"n_init", "signals", "rho", "tail_fraction"});
    if (!(num_at(p, "probe", "epsilon") > 0.0)) bad("probe.epsilon", "must be positive");
    if (!(num_at(p, "probe", "R") > 0.0)) bad("probe.R", "must be positive");
    if (!(num_at(p, "probe", "horizon") > 0.0)) bad("probe.horizon", "must be positive");
    if (int_at(p, "probe", "budget") < 1) bad("probe.budget", "must be at least 1");
    if (lookup(p, "max_switches") && int_at(p, "probe", "max_switches") < 0)
      bad("probe.max_switches", "must be nonnegative");
    const std::string obj = str_at(p, "probe", "objective", std::string("max-attainment-time"));
    if (obj != "max-attainment-time") bad("probe.objective", "unknown objective: " + obj);
    check_tol();
  } else if (kind == "barbalat") {
    reject({"epsilon", "R", "n_init", "horizon", "tol", "signals", "budget", "max_switches",
            "objective"});
    const std::string rho = str_at(p, "probe", "rho", std::string("identity"));
    if (rho != "identity" && rho != "quadratic")
      bad("probe.rho", "expected \"identity\" or \"quadratic\"");
    check_tail();
  } else {
    bad("probe.kind", "unknown kind: " + kind);
  }
}

void check_dads(const json& d) {
  expect_keys(d, "dads", {"scenario", "tol"});
  const json* sc = lookup(d, "scenario");
  if (!sc) bad("dads.scenario", "required section missing");
  expect_keys(*sc, "dads.scenario", {"theta", "y0", "z0", "horizon", "signal"});
  num_at(*sc, "dads.scenario", "theta");
  num_at(*sc, "dads.scenario", "y0");
  num_at(*sc, "dads.scenario", "z0", 0.0);
  if (!(num_at(*sc, "dads.scenario", "horizon") > 0.0))
    bad("dads.scenario.horizon", "must be positive");
  if (const json* sg = lookup(*sc, "signal")) check_signal(*sg, "dads.scenario.signal");
  if (const json* t = lookup(d, "tol")) {
    expect_keys(*t, "dads.tol", {"pios", "z_monotone", "gain", "regulation"});
    for (const char* key : {"pios", "z_monotone", "gain", "regulation"})
      if (lookup(*t, key) && num_at(*t, "dads.tol", key) < 0.0)
        bad(join("dads.tol", key), "must be nonnegative");
  }
}

// --- realization --------------------------------------------------------

dads::DadsParams parse_params(const json* p) {
  dads::DadsParams out;
  if (!p) return out;
  const std::string path = "system.params";
  out.Gamma = num_at(*p, path, "Gamma", out.Gamma);
  out.eps_dz = num_at(*p, path, "eps_dz", out.eps_dz);
  out.c = num_at(*p, path, "c", out.c);
  out.a = num_at(*p, path, "a", out.a);
  const std::string phi = str_at(*p, path, "phi", std::string("one"));
  if (phi == "linear") {
    out.phi = [](double y) { return y; };
    out.dphi = [](double) { return 1.0; };
    out.phi_is_one = false;
  } else if (phi == "quadratic") {
    out.phi = [](double y) { return y * y; };
    out.dphi = [](double y) { return 2.0 * y; };
    out.phi_is_one = false;
  }
  return out;
}

struct BuiltSystem {
  dynsys::DynamicalSystem sys;
  std::string id;
  dads::DadsParams params;  // dads only
  double theta = 0.0;       // dads only
  double d_max = 1.0;
};

BuiltSystem build_system(const json& config) {
  const json& s = config.at("system");
  BuiltSystem out;
  out.id = s.at("id").get<std::string>();
  out.d_max = num_at(s, "system", "d_max", 1.0);
  if (out.id == "example1") {
    out.sys = builtin::example1(out.d_max);
  } else {
    const json* p = lookup(s, "params");
    out.params = parse_params(p);
    out.theta = p ? num_at(*p, "system.params", "theta", 0.0) : 0.0;
    out.sys = dads::make_closed_loop(out.theta, out.params, out.d_max);
  }
  return out;
}

certkit::CertificateBundle build_bundle(const json& config, const BuiltSystem& bs) {
  const json& c = config.at("certificate");
  const std::string id = c.at("id").get<std::string>();
  if (id == "example1_ios") {
    if (bs.id != "example1") bad("certificate.id", "example1_ios pairs with the example1 system");
    return builtin::example1_bundle();
  }
  if (bs.id != "dads") bad("certificate.id", id + " pairs with the dads system");
  if (id == "dads")
    return dads::dads_certificates(bs.params, bs.theta, num_at(c, "certificate", "r_probe", 1.0));
  return dads::dads_ios_bundle(bs.params, bs.theta, num_at(c, "certificate", "lambda", 0.5));
}

certkit::DomainSample build_sample(const json& config, const BuiltSystem& bs) {
  const json& s = config.at("sample");
  certkit::DomainSample out;
  out.box_lo = vec_at(s, "sample", "box_lo");
  out.box_hi = vec_at(s, "sample", "box_hi");
  if (static_cast<int>(out.box_lo.size()) != bs.sys.dim_state)
    bad("sample.box_lo", "size must match the state dimension");
  const json& d = s.at("density");
  if (d.is_array())
    for (const json& e : d) out.density.push_back(static_cast<int>(e.get<long long>()));
  else
    out.density.assign(out.box_lo.size(), static_cast<int>(d.get<long long>()));
  const int dd = static_cast<int>(int_at(s, "sample", "disturbance_density", 5));
  out.disturbance_samples = bs.sys.disturbance_set.grid(dd);
  out.refinement = static_cast<int>(int_at(s, "sample", "refinement", 4));
  out.slack_abs = num_at(s, "sample", "slack", 1e-9);
  return out;
}

dynsys::SignalSpec parse_signal(const json& s, const std::string& path) {
  check_signal(s, path);
  dynsys::SignalSpec spec;
  spec.kind = dynsys::signal_kind_from_string(s.at("kind").get<std::string>());
  switch (spec.kind) {
    case dynsys::SignalKind::zero:
      break;
    case dynsys::SignalKind::constant:
      spec.value = vec_at(s, path, "value");
      break;
    case dynsys::SignalKind::piecewise_constant:
      spec.times = vec_at(s, path, "times");
      spec.values = vec_list_at(s, path, "values");
      break;
    case dynsys::SignalKind::sinusoid:
      spec.amplitude = vec_at(s, path, "amplitude");
      spec.omega = num_at(s, path, "omega", 1.0);
      spec.phase = num_at(s, path, "phase", 0.0);
      break;
    case dynsys::SignalKind::decaying:
      spec.amplitude = vec_at(s, path, "amplitude");
      spec.rate = num_at(s, path, "rate", 1.0);
      break;
    case dynsys::SignalKind::random_steps:
      spec.n_steps = static_cast<int>(int_at(s, path, "n_steps"));
      spec.span = num_at(s, path, "span");
      break;
  }
  return spec;
}

dynsys::DisturbanceSignal realize_signal(const json* spec, const std::string& path,
                                         const dynsys::DomainSpec& domain, std::uint64_t seed) {
  if (!spec) return dynsys::DisturbanceSignal::zero(domain.dim());
  try {
    return dynsys::make_signal(parse_signal(*spec, path), domain, seed);
  } catch (const OutOfDomain& e) {
    bad(path, e.what());
  } catch (const std::invalid_argument& e) {
    bad(path, e.what());
  }
}

dynsys::Trajectory simulate_from_config(const json& config, const BuiltSystem& bs,
                                        std::uint64_t seed) {
  const json& sim = config.at("simulate");
  dynsys::Vec x0 = vec_at(sim, "simulate", "x0");
  if (static_cast<int>(x0.size()) != bs.sys.dim_state)
    bad("simulate.x0", "size must match the state dimension");
  dynsys::SimOptions opt;
  opt.tol = num_at(sim, "simulate", "tol", opt.tol);
  auto d = realize_signal(lookup(sim, "signal"), "simulate.signal", bs.sys.disturbance_set, seed);
  return dynsys::simulate(bs.sys, x0, d, num_at(sim, "simulate", "horizon"), opt);
}

// --- subcommand pipelines ------------------------------------------------

struct Artifact {
  std::string name;
  std::string bytes;
};

struct SubResult {
  int exit_code = kExitOk;
  std::vector<Artifact> files;
};

void add_json(SubResult& r, const std::string& name, const json& j) {
  r.files.push_back({name, io::dump_json_17(j)});
}

SubResult run_simulate(const json& config, std::uint64_t seed, const std::string& format) {
  const BuiltSystem bs = build_system(config);
  const auto traj = simulate_from_config(config, bs, seed);
  SubResult out;
  if (format == "csv") {
    std::ostringstream os;
    io::trajectory_csv(traj, os);
    out.files.push_back({"trajectory.csv", os.str()});
  } else {
    add_json(out, "trajectory.json", io::trajectory_json(traj));
  }
  return out;
}

SubResult run_certify(const json& config, int jobs) {
  const BuiltSystem bs = build_system(config);
  const auto bundle = build_bundle(config, bs);
  const auto sample = build_sample(config, bs);
  const auto theorem =
      certkit::theorem_from_string(config.at("certify").at("theorem").get<std::string>());
  certkit::Verdict verdict;
  try {
    verdict = certkit::certify(bs.sys, bundle, theorem, sample, jobs);
  } catch (const MissingBundleField& e) {
    bad("certify.theorem", e.what());
  }
  SubResult out;
  add_json(out, "verdict.json", io::to_json(verdict));
  out.exit_code = verdict.passed ? kExitOk : kExitVerdictFailed;
  log(verdict.passed ? LogLevel::info : LogLevel::warn,
      "certify " + certkit::to_string(theorem) + ": " +
          (verdict.passed ? "passed" : "failed with " +
                                           std::to_string(verdict.violations.size()) +
                                           " violation(s)"));
  return out;
}

rates::ConvergenceBound bound_from_config(const json& config, const BuiltSystem& bs,
                                          const certkit::CertificateBundle& bundle) {
  const json& b = config.at("bound");
  const std::string kind = b.at("kind").get<std::string>();
  const double eps = num_at(b, "bound", "epsilon");
  const double R = num_at(b, "bound", "R");
  const int density = static_cast<int>(int_at(b, "bound", "density", 201));
  if (kind == "case_i")
    return rates::convergence_time_case_i(bundle.V, bundle.rho, bundle.a, bundle.r, eps, R,
                                          density);
  if (kind == "case_ii") {
    if (!bundle.Q || !bundle.zeta) bad("bound.kind", "case_ii needs a certificate with Q and zeta");
    return rates::convergence_time_case_ii(bundle.V, *bundle.Q, *bundle.zeta, bundle.rho, bundle.a,
                                           bundle.r, eps, R, density);
  }
  (void)bs;
  return rates::ios_time(bundle.V, bundle.W, bundle.rho, eps, R, density);
}

SubResult run_bound(const json& config) {
  const BuiltSystem bs = build_system(config);
  const auto bundle = build_bundle(config, bs);
  const auto cb = bound_from_config(config, bs, bundle);
  json j = io::to_json(cb);
  j["kind"] = config.at("bound").at("kind");
  j["certificate"] = config.at("certificate").at("id");
  SubResult out;
  add_json(out, "bound.json", j);
  return out;
}

SubResult run_probe(const json& config, std::uint64_t seed, const std::string& format, int jobs) {
  const json& p = config.at("probe");
  const std::string kind = p.at("kind").get<std::string>();
  const BuiltSystem bs = build_system(config);
  SubResult out;

  if (kind == "uniformity") {
    const json& sigs = p.at("signals");
    std::vector<dynsys::DisturbanceSignal> signals;
    signals.reserve(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i)
      signals.push_back(realize_signal(&sigs[i], "probe.signals[" + std::to_string(i) + "]",
                                       bs.sys.disturbance_set, seed + i));
    probes::ProbeOptions opt;
    opt.tol = num_at(p, "probe", "tol", opt.tol);
    opt.seed = seed;
    opt.jobs = jobs;
    opt.tail_fraction = num_at(p, "probe", "tail_fraction", opt.tail_fraction);
    if (config.contains("certificate") && config.contains("bound"))
      opt.theory_T = bound_from_config(config, bs, build_bundle(config, bs)).T;
    const auto rep = probes::uniformity_probe(
        bs.sys, num_at(p, "probe", "R"), num_at(p, "probe", "epsilon"),
        static_cast<int>(int_at(p, "probe", "n_init")), signals, num_at(p, "probe", "horizon"),
        opt);
    json j;
    j["kind"] = "uniformity";
    j["report"] = io::to_json(rep);
    add_json(out, "probe_report.json", j);
    if (format == "csv") {
      std::vector<double> idx(rep.attainment_times.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
      std::ostringstream os;
      io::series_csv("attainment_time", idx, rep.attainment_times, os);
      out.files.push_back({"attainment_times.csv", os.str()});
    }
    out.exit_code = rep.not_attained == 0 && rep.within_theory ? kExitOk : kExitVerdictFailed;
    return out;
  }

  if (kind == "falsify") {
    probes::FalsifyObjective objective;
    objective.epsilon = num_at(p, "probe", "epsilon");
    probes::FalsifyOptions opt;
    opt.R = num_at(p, "probe", "R");
    opt.horizon = num_at(p, "probe", "horizon");
    opt.tol = num_at(p, "probe", "tol", opt.tol);
    opt.max_switches = static_cast<int>(int_at(p, "probe", "max_switches", opt.max_switches));
    opt.jobs = jobs;
    const auto witness = probes::falsify(bs.sys, objective,
                                         static_cast<int>(int_at(p, "probe", "budget")), seed, opt);
    json j;
    j["kind"] = "falsify";
    j["report"] = io::to_json(witness);
    add_json(out, "probe_report.json", j);
    out.exit_code = witness.not_attained ? kExitVerdictFailed : kExitOk;
    return out;
  }

  // barbalat: the probed signal is |y(t)| along the configured simulation
  const auto traj = simulate_from_config(config, bs, seed);
  probes::SampledSignal phi;
  phi.times = traj.times;
  phi.values.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) phi.values.push_back(traj.output_norm(i));
  const std::string rho_name = str_at(p, "probe", "rho", std::string("identity"));
  const auto rho = rho_name == "identity" ? rates::RateFunction::identity()
                                          : rates::RateFunction::power(1.0, 2.0);
  const double tail_fraction = num_at(p, "probe", "tail_fraction", 0.2);
  const auto rep = probes::barbalat_probe(phi, rho, tail_fraction);
  json j;
  j["kind"] = "barbalat";
  j["report"] = io::to_json(rep);
  add_json(out, "probe_report.json", j);
  if (format == "csv") {
    std::ostringstream os;
    io::series_csv("phi", phi.times, phi.values, os);
    out.files.push_back({"phi.csv", os.str()});
  }
  out.exit_code = rep.consistent ? kExitOk : kExitVerdictFailed;
  return out;
}

SubResult run_dads(const json& config, std::uint64_t seed, const std::string& format) {
  const BuiltSystem bs = build_system(config);
  const json& d = config.at("dads");
  const json& scj = d.at("scenario");
  dads::DadsScenario sc;
  sc.theta = num_at(scj, "dads.scenario", "theta");
  sc.y0 = num_at(scj, "dads.scenario", "y0");
  sc.z0 = num_at(scj, "dads.scenario", "z0", 0.0);
  sc.horizon = num_at(scj, "dads.scenario", "horizon");
  sc.disturbance =
      realize_signal(lookup(scj, "signal"), "dads.scenario.signal", bs.sys.disturbance_set, seed);
  dads::DadsTolerances tol;
  if (const json* t = lookup(d, "tol")) {
    tol.pios = num_at(*t, "dads.tol", "pios", tol.pios);
    tol.z_monotone = num_at(*t, "dads.tol", "z_monotone", tol.z_monotone);
    tol.gain = num_at(*t, "dads.tol", "gain", tol.gain);
    tol.regulation = num_at(*t, "dads.tol", "regulation", tol.regulation);
  }
  const auto rep = dads::dads_property_suite(sc, bs.params, tol);
  SubResult out;
  add_json(out, "dads_report.json", io::to_json(rep));
  if (format == "csv") {
    // same loop and integrator settings the property suite used
    auto sys = dads::make_closed_loop(
        sc.theta, bs.params,
        dynsys::DomainSpec::ball(1, std::max(1.0, sc.disturbance.sup_norm())));
    const auto traj = dynsys::simulate(sys, {sc.y0, sc.z0}, sc.disturbance, sc.horizon);
    std::ostringstream os;
    io::trajectory_csv(traj, os);
    out.files.push_back({"trajectory.csv", os.str()});
  }
  const bool passed =
      rep.pios_bound_ok && rep.z_monotone_ok && rep.z_bounded_ok && rep.asymptotic_gain_ok;
  out.exit_code = passed ? kExitOk : kExitVerdictFailed;
  return out;
}

}  // namespace

void validate_config(const std::string& subcommand, const json& config) {
  static const char* kSubcommands[] = {"simulate", "certify", "bound", "probe", "dads"};
  if (std::find(std::begin(kSubcommands), std::end(kSubcommands), subcommand) ==
      std::end(kSubcommands))
    throw ConfigInvalid("unknown subcommand: " + subcommand);

  expect_keys(config, "",
              {"seed", "jobs", "system", "certificate", "sample", "simulate", "certify", "bound",
               "probe", "dads", "output"});
  if (const json* s = lookup(config, "seed")) {
    if (!s->is_number_integer() || (!s->is_number_unsigned() && s->get<long long>() < 0))
      bad("seed", "expected a nonnegative integer");
  }
  if (lookup(config, "jobs") && int_at(config, "", "jobs") < 0) bad("jobs", "must be nonnegative");
  if (const json* o = lookup(config, "output")) {
    expect_keys(*o, "output", {"format"});
    const std::string format = str_at(*o, "output", "format", std::string("json"));
    if (format != "csv" && format != "json") bad("output.format", "expected \"csv\" or \"json\"");
  }

  if (const json* s = lookup(config, "system")) check_system(*s);
  if (const json* c = lookup(config, "certificate")) check_certificate(*c);
  if (const json* s = lookup(config, "sample")) check_sample(*s);
  if (const json* s = lookup(config, "simulate")) check_simulate(*s);
  if (const json* c = lookup(config, "certify")) check_certify(*c);
  if (const json* b = lookup(config, "bound")) check_bound(*b);
  if (const json* p = lookup(config, "probe")) check_probe(*p);
  if (const json* d = lookup(config, "dads")) check_dads(*d);

  auto require = [&](const char* name) {
    if (!config.contains(name))
      bad(name, "section required by the " + subcommand + " subcommand");
  };
  if (subcommand == "simulate") {
    require("system");
    require("simulate");
  } else if (subcommand == "certify") {
    require("system");
    require("certificate");
    require("sample");
    require("certify");
  } else if (subcommand == "bound") {
    require("system");
    require("certificate");
    require("bound");
  } else if (subcommand == "probe") {
    require("system");
    require("probe");
    if (config.at("probe").at("kind") == "barbalat") require("simulate");
  } else {
    require("system");
    require("dads");
    if (config.at("system").at("id") != "dads")
      bad("system.id", "the dads subcommand needs the dads system");
  }
}

RunResult run(const std::string& subcommand, const json& config, const std::string& out_dir,
              const RunOverrides& overrides) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_config(subcommand, config);

  std::uint64_t seed = 0;
  if (const json* s = lookup(config, "seed")) seed = s->get<std::uint64_t>();
  if (overrides.seed) seed = *overrides.seed;

  std::string format = "json";
  if (const json* o = lookup(config, "output"))
    format = str_at(*o, "output", "format", format);
  if (overrides.format) {
    if (*overrides.format != "csv" && *overrides.format != "json")
      throw ConfigInvalid("--format: expected \"csv\" or \"json\"");
    format = *overrides.format;
  }

  int jobs = 0;
  if (const json* j = lookup(config, "jobs")) jobs = static_cast<int>(j->get<long long>());
  if (overrides.jobs) {
    if (*overrides.jobs < 0) throw ConfigInvalid("--jobs: must be nonnegative");
    jobs = *overrides.jobs;
  }

  log(LogLevel::info,
      "run " + subcommand + " (seed " + std::to_string(seed) + ", format " + format + ")");

  SubResult sub;
  if (subcommand == "simulate")
    sub = run_simulate(config, seed, format);
  else if (subcommand == "certify")
    sub = run_certify(config, jobs);
  else if (subcommand == "bound")
    sub = run_bound(config);
  else if (subcommand == "probe")
    sub = run_probe(config, seed, format, jobs);
  else
    sub = run_dads(config, seed, format);

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  RunResult out;
  out.exit_code = sub.exit_code;
  for (const auto& a : sub.files) {
    std::ofstream os(fs::path(out_dir) / a.name, std::ios::binary);
    os << a.bytes;
    if (!os) throw std::runtime_error("failed to write " + a.name);
    out.artifacts.push_back(a.name);
  }

  json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["config_hash"] = io::hash_hex(config);
  manifest["seed"] = seed;
  manifest["wall_clock_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest["artifacts"] = out.artifacts;
  {
    std::ofstream os(fs::path(out_dir) / "manifest.json", std::ios::binary);
    os << io::dump_json_17(manifest);
    if (!os) throw std::runtime_error("failed to write manifest.json");
  }
  out.artifacts.push_back("manifest.json");
  out.manifest = std::move(manifest);
  return out;
}

json catalog_json() {
  json out = json::array();
  for (const auto& info : builtin::catalog()) {
    json params = json::object();
    for (const auto& [name, meaning] : info.params) params[name] = meaning;
    out.push_back({{"id", info.id},
                   {"dim_state", info.dim_state},
                   {"dim_disturbance", info.dim_disturbance},
                   {"dim_output", info.dim_output},
                   {"description", info.description},
                   {"params", params}});
  }
  return out;
}

}  // namespace outstab::shell

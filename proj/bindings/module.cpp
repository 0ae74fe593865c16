#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "outstab/dads.hpp"
#include "outstab/errors.hpp"
#include "outstab/io.hpp"
#include "outstab/probes.hpp"
#include "outstab/rates.hpp"
#include "outstab/shell.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::dict threshold_dict(const outstab::dads::ThetaThreshold& t) {
  py::dict d;
  d["closed_form"] = t.closed_form ? py::cast(*t.closed_form) : py::object(py::none());
  d["universal"] = t.universal;
  d["numeric"] = t.numeric;
  return d;
}

outstab::dads::DadsParams make_params(double Gamma, double eps_dz, double c, double a) {
  outstab::dads::DadsParams p;
  p.Gamma = Gamma;
  p.eps_dz = eps_dz;
  p.c = c;
  p.a = a;
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "config-driven runs plus direct numeric probes; complex payloads travel as JSON text";
  m.attr("__version__") = outstab::shell::kToolVersion;

  m.def("catalog_json",
        [] { return outstab::io::dump_json_17(outstab::shell::catalog_json()); });

  m.def(
      "validate_config_json",
      [](const std::string& subcommand, const std::string& config) {
        try {
          outstab::shell::validate_config(subcommand, json::parse(config));
        } catch (const outstab::ConfigInvalid& e) {
          throw py::value_error(e.what());
        }
      },
      py::arg("subcommand"), py::arg("config"));

  m.def(
      "run_json",
      [](const std::string& subcommand, const std::string& config, const std::string& out_dir,
         std::optional<std::uint64_t> seed, std::optional<std::string> format,
         std::optional<int> jobs) {
        outstab::shell::RunOverrides overrides;
        overrides.seed = seed;
        overrides.format = std::move(format);
        overrides.jobs = jobs;
        try {
          const auto result =
              outstab::shell::run(subcommand, json::parse(config), out_dir, overrides);
          json out;
          out["exit_code"] = result.exit_code;
          out["artifacts"] = result.artifacts;
          out["manifest"] = result.manifest;
          return outstab::io::dump_json_17(out);
        } catch (const outstab::ConfigInvalid& e) {
          throw py::value_error(e.what());
        }
      },
      py::arg("subcommand"), py::arg("config"), py::arg("out_dir"),
      py::arg("seed") = std::nullopt, py::arg("format") = std::nullopt,
      py::arg("jobs") = std::nullopt);

  m.def(
      "theta_threshold_ugaos",
      [](double Gamma, double eps_dz, double c, double a, double y_lo, double y_hi) {
        return threshold_dict(
            outstab::dads::theta_threshold_ugaos(make_params(Gamma, eps_dz, c, a), y_lo, y_hi));
      },
      py::arg("Gamma"), py::arg("eps_dz"), py::arg("c"), py::arg("a"), py::arg("y_lo"),
      py::arg("y_hi"));

  m.def(
      "theta_threshold_ios",
      [](double Gamma, double eps_dz, double c, double a, double y_hi,
         std::vector<double> lambda_grid) {
        return threshold_dict(outstab::dads::theta_threshold_ios(make_params(Gamma, eps_dz, c, a),
                                                                 y_hi, lambda_grid));
      },
      py::arg("Gamma"), py::arg("eps_dz"), py::arg("c"), py::arg("a"), py::arg("y_hi"),
      py::arg("lambda_grid") = std::vector<double>{0.25, 0.5, 0.75});

  m.def(
      "quc_check",
      [](std::vector<double> times, std::vector<double> values, std::vector<double> eps_list,
         std::vector<double> delta_grid) {
        outstab::probes::SampledSignal phi{std::move(times), std::move(values)};
        return outstab::io::dump_json_17(
            outstab::io::to_json(outstab::probes::quc_check(phi, eps_list, delta_grid)));
      },
      py::arg("times"), py::arg("values"), py::arg("eps_list"), py::arg("delta_grid"));

  m.def(
      "barbalat",
      [](std::vector<double> times, std::vector<double> values, const std::string& rho,
         double tail_fraction) {
        const auto rate = rho == "quadratic" ? outstab::rates::RateFunction::power(1.0, 2.0)
                                             : outstab::rates::RateFunction::identity();
        outstab::probes::SampledSignal phi{std::move(times), std::move(values)};
        return outstab::io::dump_json_17(
            outstab::io::to_json(outstab::probes::barbalat_probe(phi, rate, tail_fraction)));
      },
      py::arg("times"), py::arg("values"), py::arg("rho") = "identity",
      py::arg("tail_fraction") = 0.2);
}

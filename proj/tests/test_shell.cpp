#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "outstab/errors.hpp"
#include "outstab/shell.hpp"

using namespace outstab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("outstab_test_" + tag);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json certify_config() {
  return json{
      {"system", {{"id", "example1"}, {"d_max", 1.0}}},
      {"certificate", {{"id", "example1_ios"}}},
      {"sample",
       {{"box_lo", {-5.0, -5.0}},
        {"box_hi", {5.0, 5.0}},
        {"density", 11},
        {"disturbance_density", 5},
        {"slack", 1e-9}}},
      {"certify", {{"theorem", "thm3_ios"}}},
  };
}

}  // namespace

TEST_CASE("unknown config keys are rejected with their path") {
  auto cfg = certify_config();
  cfg["certificate"]["rho_typo"] = 1.0;
  try {
    shell::validate_config("certify", cfg);
    FAIL("expected ConfigInvalid");
  } catch (const ConfigInvalid& e) {
    CHECK(std::string(e.what()).find("rho_typo") != std::string::npos);
  }
}

TEST_CASE("missing required sections are named") {
  auto cfg = certify_config();
  cfg.erase("sample");
  try {
    shell::validate_config("certify", cfg);
    FAIL("expected ConfigInvalid");
  } catch (const ConfigInvalid& e) {
    CHECK(std::string(e.what()).find("sample") != std::string::npos);
  }
}

TEST_CASE("configs that fail validation leave no artifacts behind") {
  auto cfg = certify_config();
  cfg["certificate"]["rho_typo"] = 1.0;
  auto out = fresh_dir("invalid");
  CHECK_THROWS_AS(shell::run("certify", cfg, out.string()), ConfigInvalid);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("a passing certification run writes verdict and manifest") {
  auto out = fresh_dir("certify");
  auto res = shell::run("certify", certify_config(), out.string());
  CHECK(res.exit_code == shell::kExitOk);
  CHECK(fs::exists(out / "verdict.json"));
  CHECK(fs::exists(out / "manifest.json"));

  auto manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["tool_version"] == shell::kToolVersion);
  CHECK(manifest["seed"] == 0);
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  bool listed = false;
  for (const auto& a : manifest["artifacts"])
    if (a.get<std::string>() == "verdict.json") listed = true;
  CHECK(listed);

  auto verdict = json::parse(slurp(out / "verdict.json"));
  CHECK(verdict["passed"] == true);
  CHECK(verdict["violations"].empty());
}

TEST_CASE("identical config and seed give byte-identical reports") {
  auto outA = fresh_dir("det_a");
  auto outB = fresh_dir("det_b");
  shell::run("certify", certify_config(), outA.string());
  shell::run("certify", certify_config(), outB.string());
  CHECK(slurp(outA / "verdict.json") == slurp(outB / "verdict.json"));
}

TEST_CASE("failed property checks still write their report") {
  json cfg{
      {"system",
       {{"id", "dads"},
        {"d_max", 1.0},
        {"params",
         {{"Gamma", 0.01}, {"eps_dz", 0.1}, {"c", 1.0}, {"a", 0.5}, {"theta", 4.0}}}}},
      {"dads",
       {{"scenario",
         {{"theta", 4.0},
          {"y0", 3.0},
          {"z0", 0.0},
          {"horizon", 30.0},
          {"signal",
           {{"kind", "sinusoid"}, {"amplitude", {1.0}}, {"omega", 1.0}}}}}}},
  };
  auto out = fresh_dir("dads_fail");
  auto res = shell::run("dads", cfg, out.string());
  CHECK(res.exit_code == shell::kExitVerdictFailed);
  CHECK(fs::exists(out / "dads_report.json"));
  auto rep = json::parse(slurp(out / "dads_report.json"));
  CHECK(rep["asymptotic_gain_ok"] == false);
}

TEST_CASE("simulation exports follow the requested format") {
  json cfg{
      {"system", {{"id", "example1"}}},
      {"simulate",
       {{"x0", {0.0, 1.0}},
        {"horizon", 2.0},
        {"signal", {{"kind", "constant"}, {"value", {0.5}}}}}},
  };
  auto outJ = fresh_dir("sim_json");
  auto resJ = shell::run("simulate", cfg, outJ.string());
  CHECK(resJ.exit_code == 0);
  CHECK(fs::exists(outJ / "trajectory.json"));

  auto outC = fresh_dir("sim_csv");
  shell::RunOverrides ov;
  ov.format = "csv";
  auto resC = shell::run("simulate", cfg, outC.string(), ov);
  CHECK(resC.exit_code == 0);
  auto csv = slurp(outC / "trajectory.csv");
  CHECK(csv.rfind("t,x1,x2,y1\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("the catalog lists resolvable systems") {
  auto cat = shell::catalog_json();
  REQUIRE(cat.is_array());
  REQUIRE(cat.size() == 2);
  bool ex1 = false, loop = false;
  for (const auto& e : cat) {
    if (e["id"] == "example1") {
      ex1 = true;
      CHECK(e["dim_state"] == 2);
      CHECK(e["dim_disturbance"] == 1);
    }
    if (e["id"] == "dads") loop = true;
  }
  CHECK(ex1);
  CHECK(loop);

  json cfg{
      {"system", {{"id", "dads"}}},
      {"simulate",
       {{"x0", {0.5, 0.0}}, {"horizon", 1.0}, {"signal", {{"kind", "zero"}}}}},
  };
  auto out = fresh_dir("catalog_run");
  CHECK(shell::run("simulate", cfg, out.string()).exit_code == 0);
}

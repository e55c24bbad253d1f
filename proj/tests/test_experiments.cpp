#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "scl/experiments.hpp"

using namespace scl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("scl_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(SCL_LAB_PATH) + " " + args + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string field_of(const nlohmann::json& j) {
  try {
    config_from_json(j).validate();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const auto c = config_from_json(nlohmann::json::object());
  CHECK(c.family == "critical-sine");
  CHECK(c.depth == 14);
  CHECK_NOTHROW(c.validate());
  CHECK(c.rotation_number().cf().size() >= 40);
  CHECK(config_from_json({{"target", "silver"}}).rotation_number().cf().a(1) == 2);
  CHECK(config_from_json({{"target", {1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2}}}).rotation_number().cf().size() ==
        16);

  CHECK(field_of({{"target", {1, 0, 2}}}) == "target");
  CHECK(field_of({{"target", "bronze"}}) == "target");
  CHECK(field_of({{"depth", 1}}) == "depth");
  CHECK(field_of({{"depth", "deep"}}) == "depth");
  CHECK(field_of({{"samples_mu", 0}}) == "samples_mu");
  CHECK(field_of({{"family", "standard"}}) == "family");
  CHECK(field_of({{"family", "cubic-proxy"}}) == "family");
  CHECK(field_of({{"refinements", {4}}}) == "refinements");
  CHECK(field_of({{"colour", 3}}) == "colour");
  CHECK(field_of({{"sampling_scheme", "sobol"}}) == "sampling_scheme");
  CHECK(field_of({{"seed", 18446744073709551615ULL}}) == "");
}

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.seed = 77;
  c.target = nlohmann::json::array({2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2});
  const auto back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
}

TEST_CASE("tune command") {
  ExperimentConfig c;
  c.out_dir = scratch("tune").string();
  const auto report = cmd_tune(c);
  CHECK(std::abs(report.json["results"]["omega"].get<double>() - 0.6066610634701) < 1e-12);
  const auto& rows = report.json["results"]["closest_returns"];
  REQUIRE(rows.size() == 12);
  const std::int64_t fib[] = {1, 2, 3, 5, 8, 13};
  for (int i = 0; i < 6; ++i) CHECK(rows[i]["q"] == fib[i]);
  CHECK(report.json["config"] == to_json(c));
  CHECK(report.json["version"] == kSoftwareVersion);
  CHECK(fs::exists(fs::path(c.out_dir) / "closest_returns.csv"));
  CHECK(fs::exists(fs::path(c.out_dir) / "report.json"));

  c.family = "rigid-rotation";
  CHECK(cmd_tune(c).json["results"]["omega"].get<double>() == doctest::Approx(0.6180339887498949));
}

TEST_CASE("exponents command on the rigid rotation") {
  ExperimentConfig c;
  c.family = "rigid-rotation";
  c.depth = 12;
  c.samples_mu = c.samples_lebesgue = 100;
  c.out_dir = scratch("rot").string();
  const auto r = cmd_exponents(c).json["results"];
  for (const char* key : {"tau_lebesgue", "tau_mu", "gamma_from_mu"}) {
    CHECK(std::abs(r[key]["mean_final"].get<double>() - 1.0) < 0.01);
    CHECK(std::abs(r[key]["tail_min"].get<double>() - 1.0) < 0.01);
  }
  CHECK(std::abs(r["hausdorff"]["value"].get<double>() - 1.0) < 0.01);
}

TEST_CASE("exponents command is deterministic and flags truncation") {
  ExperimentConfig c;
  c.samples_mu = c.samples_lebesgue = 40;
  c.out_dir = scratch("det").string();
  cmd_exponents(c);
  const auto first = slurp(fs::path(c.out_dir) / "exponent_samples.csv");
  const auto first_report = slurp(fs::path(c.out_dir) / "report.json");
  c.threads = 3;
  cmd_exponents(c);
  c.threads = 0;
  cmd_exponents(c);
  CHECK(slurp(fs::path(c.out_dir) / "exponent_samples.csv") == first);
  CHECK(slurp(fs::path(c.out_dir) / "report.json") == first_report);
  CHECK(first.rfind("measure,seed,sample,x,level,r\n", 0) == 0);

  c.depth = 45;
  c.out_dir = scratch("trunc").string();
  const auto report = cmd_exponents(c);
  REQUIRE_FALSE(report.warnings.empty());
  CHECK(report.warnings[0].find("truncated at level") == 0);
  CHECK(report.json["results"].contains("truncated_at"));
}

TEST_CASE("discrepancy command") {
  ExperimentConfig c;
  c.out_dir = scratch("disc").string();
  const auto report = cmd_discrepancy(c);
  CHECK(report.failures.empty());
  for (const auto& row : report.json["results"]["min_delta_at_refinement"]) CHECK(row["min_delta"].get<double>() > 0);
  for (const auto& row : report.json["results"]["summary"]) CHECK(row["min_gibbs_gap"].get<double>() >= -1e-12);

  c.family = "rigid-rotation";
  c.out_dir = scratch("disc_rot").string();
  for (const auto& row : cmd_discrepancy(c).json["results"]["summary"]) CHECK(row["max_delta"].get<double>() < 1e-6);
}

TEST_CASE("crossratio-check command") {
  ExperimentConfig c;
  c.identity_sweep = 500;
  c.quadrature_sweep = 10;
  c.schwarzian_sweep = 100;
  c.out_dir = scratch("cr").string();
  const auto report = cmd_crossratio_check(c);
  CHECK(report.failures.empty());
  CHECK(report.json["results"]["identity"]["max_residual"].get<double>() < 1e-12);
}

TEST_CASE("command line exit status") {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << R"({"target": [1, 0, 2]})";
  const auto broken = dir / "broken.json";
  std::ofstream(broken) << "{ not json";
  CHECK(run_cli("tune --config " + bad.string() + " --out " + (dir / "a").string()) == 2);
  CHECK(run_cli("tune --config " + broken.string() + " --out " + (dir / "a").string()) == 2);
  CHECK(run_cli("tune --depth 1 --out " + (dir / "a").string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("tune --out " + (dir / "ok").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "report.json"));
  CHECK(run_cli("exponents --depth 3 --samples 5 --seed 9 --out " + (dir / "e").string()) == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "e" / "report.json"));
  CHECK(report["config"]["seed"] == 9);
  CHECK(report["config"]["samples_mu"] == 5);
}

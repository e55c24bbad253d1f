#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scl/cf.hpp"
#include "scl/circle_map.hpp"
#include "scl/error.hpp"
#include "scl/measure.hpp"

namespace scl {

inline constexpr const char* kSoftwareVersion = "0.1.0";

/// Invalid configuration; the CLI maps it to exit status 2.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error("config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  std::string family = "critical-sine";
  /// "golden", "silver", or an explicit coefficient list
  nlohmann::json target = "golden";
  int tune_depth = 12;
  int depth = 14;  ///< deepest partition level for exponents and geometry
  int exponent_min_level = 2;
  int refinement = 2;
  std::vector<int> refinements{1, 2, 3};
  int discrepancy_min_level = 3;
  int discrepancy_max_level = 7;
  int samples_mu = 200;
  int samples_lebesgue = 200;
  std::string sampling_scheme = "stratified";
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  double u_radius = 0.1;
  bool truncate_on_precision = true;
  int identity_sweep = 10000;
  int quadrature_sweep = 100;
  int schwarzian_sweep = 1000;
  int threads = 0;  ///< 0: SCL_THREADS or hardware concurrency

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  RotationNumber rotation_number() const;
  Family map_family() const;
  int worker_count() const;
};

/// Unknown keys and wrongly typed values raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

struct Report {
  nlohmann::json json;                     ///< written as report.json
  std::vector<std::string> files;          ///< every file written, report.json included
  std::vector<std::string> warnings;       ///< precision cutoffs and similar
  std::vector<std::string> failures;       ///< residual checks above threshold
  double wall_seconds = 0.0;               ///< kept out of report.json
};

Report cmd_tune(const ExperimentConfig& config);
Report cmd_exponents(const ExperimentConfig& config);
Report cmd_discrepancy(const ExperimentConfig& config);
Report cmd_crossratio_check(const ExperimentConfig& config);

}  // namespace scl

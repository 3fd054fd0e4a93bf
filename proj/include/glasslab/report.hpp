#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "glasslab/quench.hpp"

namespace glasslab {

/// Everything a run needs; unspecified fields take the documented defaults.
struct RunConfig {
  std::string model_path;
  std::string suite;  // identities | thm1 | thm2 | hessian | gb | interp | meanfield | all
  std::string method_kind = "quad";  // quad | mc
  int nodes = 32;
  std::int64_t samples = 100000;
  std::optional<std::uint64_t> seed;  // default: model document seed
  std::optional<double> tol;          // override of the per-suite tolerance
  double bias_factor = 1.0;
  std::vector<double> t_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  double m_max = 2.0;
  double trial_x = 0.5;
  int z = 0;  // 0 = infer from the bond graph
  double beta = 0.5;
  std::size_t max_pairs = 20;
  std::string out_path;
  std::string csv_path;
};

struct RunReport {
  nlohmann::json document;
  int checks = 0;
  int passed = 0;
  int failed = 0;
  int controls = 0;
  int control_violations = 0;

  bool all_passed() const { return failed == 0; }
};

/// Executes the configured suite; throws ConfigurationError/CapacityError on
/// invalid inputs. The report is deterministic for a fixed config and seed
/// except for the isolated "meta" object.
RunReport run_suite(const RunConfig& config);

/// Serializes (sorted keys, 2-space indent) and optionally writes the report
/// and curve CSV files.
std::string report_to_string(const RunReport& report);
void write_report(const RunReport& report, const RunConfig& config);

nlohmann::json estimate_to_json(const QuenchedEstimate& e);

}  // namespace glasslab

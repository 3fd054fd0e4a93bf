#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glasslab/errors.hpp"
#include "glasslab/report.hpp"
#include "glasslab/version.hpp"

namespace {

void add_common_options(CLI::App* sub, glasslab::RunConfig& config) {
  sub->add_option("--model", config.model_path, "model document (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--method", config.method_kind, "disorder averaging: quad | mc")
      ->check(CLI::IsMember({"quad", "mc"}));
  sub->add_option("--nodes", config.nodes, "quadrature nodes per Gaussian dimension");
  sub->add_option("--samples", config.samples, "Monte Carlo sample count");
  sub->add_option("--seed", config.seed, "Monte Carlo seed (default: model document seed)");
  sub->add_option("--tol", config.tol, "tolerance override for the suite's checks");
  sub->add_option("--out", config.out_path, "write the JSON report here");
  sub->add_option("--csv", config.csv_path, "write curve data (t-grid, M-scan) as CSV");
  sub->add_option("--bias-factor", config.bias_factor,
                  "off-line control: D/sigma^2 = bias * beta (1 = on the line)");
  sub->add_option("--t-grid", config.t_grid, "interpolation grid in [0,1]")->delimiter(',');
  sub->add_option("--m-max", config.m_max, "mean-field search range [0, m_max]");
  sub->add_option("--trial-x", config.trial_x, "uniform one-body trial x (gb/interp)");
  sub->add_option("--z", config.z, "coordination number (meanfield; 0 = infer)");
  sub->add_option("--beta", config.beta, "inverse temperature (meanfield)");
  sub->add_option("--max-pairs", config.max_pairs, "slot-pair truncation per sweep");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gauge-glass verification laboratory on the Nishimori line"};
  app.set_version_flag("--version", glasslab::kVersion);
  app.require_subcommand(1);

  glasslab::RunConfig config;
  const std::vector<std::pair<std::string, std::string>> suites = {
      {"identities", "disorder-averaged correlation identities (I1-I5)"},
      {"thm1", "first derivative of the quenched pressure vs closed form"},
      {"thm2", "second derivative: four-squares formula"},
      {"hessian", "pressure Hessian: three assemblies, PSD check"},
      {"gb", "variational lower bound on the pressure"},
      {"interp", "interpolation curve convexity and tangent bound"},
      {"meanfield", "replica-symmetric mean-field bound (Ising, regular graph)"},
      {"all", "every applicable suite"},
  };
  for (const auto& [name, desc] : suites) add_common_options(app.add_subcommand(name, desc), config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  config.suite = app.get_subcommands().front()->get_name();

  try {
    const glasslab::RunReport report = glasslab::run_suite(config);
    glasslab::write_report(report, config);
    if (config.out_path.empty()) std::cout << glasslab::report_to_string(report);
    std::fprintf(stderr, "%d checks: %d passed, %d failed", report.checks, report.passed,
                 report.failed);
    if (report.controls > 0)
      std::fprintf(stderr, "; %d controls, %d violated (expected off the line)",
                   report.controls, report.control_violations);
    std::fprintf(stderr, "\n");
    return report.all_passed() ? 0 : 1;
  } catch (const glasslab::ConfigurationError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const glasslab::CapacityError& e) {
    std::fprintf(stderr, "capacity error: %s\n", e.what());
    return 2;
  } catch (const glasslab::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

#include "glasslab/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "glasslab/errors.hpp"
#include "glasslab/gb.hpp"
#include "glasslab/identities.hpp"
#include "glasslab/model.hpp"
#include "glasslab/parallel.hpp"
#include "glasslab/theorems.hpp"
#include "glasslab/version.hpp"

namespace glasslab {

namespace {

using nlohmann::json;

json slot_to_json(const CouplingSlot& s) {
  json j;
  if (s.one_body())
    j["site"] = s.site_a;
  else
    j["bond"] = {s.site_a, s.site_b};
  j["m"] = s.harmonic;
  return j;
}

json method_to_json(const QuenchMethod& m) {
  json j;
  if (m.kind == QuenchMethod::Kind::Quadrature) {
    j["kind"] = "quadrature";
    j["nodes_per_dim"] = m.nodes_per_dim;
  } else {
    j["kind"] = "monte_carlo";
    j["samples"] = m.n_samples;
    j["seed"] = m.seed;
  }
  return j;
}

QuenchMethod method_from_config(const RunConfig& c, std::uint64_t default_seed) {
  if (c.method_kind == "quad") return QuenchMethod::quadrature(c.nodes);
  if (c.method_kind == "mc")
    return QuenchMethod::monte_carlo(c.samples, c.seed.value_or(default_seed));
  throw ConfigurationError("method must be 'quad' or 'mc', got '" + c.method_kind + "'");
}

struct SuiteContext {
  const RunConfig& config;
  ModelSpec model;
  NishimoriParams params;
  QuenchMethod method;
  json checks = json::array();
  int checks_n = 0, passed = 0, failed = 0, controls = 0, control_violations = 0;

  void add_check(json j, bool pass) {
    j["verdict"] = pass ? "pass" : "fail";
    checks.push_back(std::move(j));
    ++checks_n;
    (pass ? passed : failed)++;
  }
  void add_control(json j, bool violated) {
    j["verdict"] = violated ? "control_violation" : "control_no_violation";
    j["control"] = true;
    checks.push_back(std::move(j));
    ++controls;
    if (violated) ++control_violations;
  }
  void add_skip(const std::string& suite, const std::string& reason) {
    json j;
    j["suite"] = suite;
    j["verdict"] = "skipped";
    j["reason"] = reason;
    checks.push_back(std::move(j));
  }

  std::vector<std::size_t> active_slots() const {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < model.n_slots(); ++i)
      if (params.x[i] > 0.0) v.push_back(i);
    return v;
  }
};

json identity_case_to_json(const IdentityCase& c) {
  json j;
  j["suite"] = "identities";
  j["id"] = identity_name(c.id);
  j["slot_a"] = slot_to_json(c.slot_a);
  j["slot_b"] = slot_to_json(c.slot_b);
  j["lhs"] = estimate_to_json(c.lhs);
  j["rhs"] = estimate_to_json(c.rhs);
  j["diff"] = estimate_to_json(c.diff);
  j["tolerance"] = c.tolerance;
  j["weak"] = c.weak;
  j["bias_factor"] = c.bias_factor;
  return j;
}

void run_identities(SuiteContext& ctx) {
  IdentityOptions opts;
  if (ctx.config.tol) opts.tol_quadrature = *ctx.config.tol;
  const auto cases = identity_sweep(ctx.model, ctx.params, ctx.method, ctx.config.bias_factor,
                                    ctx.config.max_pairs, opts);
  const bool control = ctx.config.bias_factor != 1.0;
  for (const auto& c : cases) {
    json j = identity_case_to_json(c);
    if (control)
      ctx.add_control(std::move(j), !c.pass);
    else
      ctx.add_check(std::move(j), c.pass);
  }
}

json derivative_to_json(const DerivativeReport& r, const char* suite) {
  json j;
  j["suite"] = suite;
  j["slot_a"] = slot_to_json(r.slot_a);
  j["slot_b"] = slot_to_json(r.slot_b);
  j["analytic"] = estimate_to_json(r.analytic);
  j["fd_pressure"] = estimate_to_json(r.fd_pressure);
  if (r.second_order) j["fd_correlation"] = estimate_to_json(r.fd_correlation);
  j["residual"] = estimate_to_json(r.residual);
  j["fd_step"] = r.fd_step;
  j["tolerance"] = r.tolerance;
  j["bound_ok"] = r.bound_ok;
  return j;
}

void run_thm1(SuiteContext& ctx) {
  TheoremOptions opts;
  if (ctx.config.tol) opts.tol_first = *ctx.config.tol;
  for (const std::size_t i : ctx.active_slots()) {
    const auto rep = thm1_check(ctx.model, ctx.params, i, ctx.method, opts);
    ctx.add_check(derivative_to_json(rep, "thm1"), rep.pass && rep.bound_ok);
  }
}

void run_thm2(SuiteContext& ctx) {
  TheoremOptions opts;
  if (ctx.config.tol) opts.tol_second = *ctx.config.tol;
  const auto active = ctx.active_slots();
  std::size_t pairs = 0;
  for (const std::size_t a : active) {
    for (const std::size_t b : active) {
      if (b < a) continue;  // symmetric
      if (pairs++ >= ctx.config.max_pairs) return;
      const auto rep = thm2_check(ctx.model, ctx.params, a, b, ctx.method, opts);
      ctx.add_check(derivative_to_json(rep, "thm2"), rep.pass && rep.bound_ok);
    }
  }
}

json hessian_to_json(const HessianReport& r) {
  json j;
  j["suite"] = "hessian";
  j["assembly"] = assembly_name(r.assembly);
  json slots = json::array();
  for (const auto& s : r.slots) slots.push_back(slot_to_json(s));
  j["slots"] = slots;
  json m = json::array();
  for (Eigen::Index a = 0; a < r.matrix.rows(); ++a) {
    json row = json::array();
    for (Eigen::Index b = 0; b < r.matrix.cols(); ++b) row.push_back(r.matrix(a, b));
    m.push_back(row);
  }
  j["matrix"] = m;
  j["min_eigenvalue"] = r.min_eigenvalue;
  j["spectral_norm"] = r.spectral_norm;
  j["max_asymmetry"] = r.max_asymmetry;
  return j;
}

void run_hessian(SuiteContext& ctx) {
  HessianOptions opts;
  const double agree_tol = ctx.config.tol.value_or(1e-5);
  std::vector<HessianReport> reps;
  for (const auto assembly : {HessianAssembly::FourSquares, HessianAssembly::CsAuxiliary,
                              HessianAssembly::FiniteDifference}) {
    reps.push_back(hessian_psd(ctx.model, ctx.params, ctx.method, assembly, opts));
    ctx.add_check(hessian_to_json(reps.back()), reps.back().psd_ok);
  }
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t k = i + 1; k < reps.size(); ++k) {
      const double diff = (reps[i].matrix - reps[k].matrix).cwiseAbs().maxCoeff();
      const double sigma =
          (reps[i].std_errors + reps[k].std_errors).maxCoeff();
      const double tol = std::max(agree_tol, 3.0 * sigma);
      json j;
      j["suite"] = "hessian";
      j["comparison"] = std::string(assembly_name(reps[i].assembly)) + " vs " +
                        assembly_name(reps[k].assembly);
      j["max_entry_diff"] = diff;
      j["tolerance"] = tol;
      ctx.add_check(std::move(j), diff <= tol);
    }
}

json gb_to_json(const GBReport& r) {
  json j;
  j["suite"] = "gb";
  j["lhs"] = estimate_to_json(r.lhs);
  j["rhs"] = estimate_to_json(r.rhs);
  j["slack"] = r.slack;
  j["slack_std_error"] = r.slack_std_error;
  j["tolerance"] = r.tolerance;
  return j;
}

void run_gb(SuiteContext& ctx) {
  GBOptions opts;
  if (ctx.config.tol) opts.tol = *ctx.config.tol;
  const TrialField trial = TrialField::uniform(ctx.model, 1, ctx.config.trial_x);
  const auto rep = gb_bound(ctx.model, ctx.params, trial, ctx.method, opts);
  json j = gb_to_json(rep);
  j["trial_x"] = ctx.config.trial_x;
  ctx.add_check(std::move(j), rep.pass);
}

void run_interp(SuiteContext& ctx) {
  GBOptions opts;
  if (ctx.config.tol) opts.tol = *ctx.config.tol;
  const TrialField trial = TrialField::uniform(ctx.model, 1, ctx.config.trial_x);
  const auto rep =
      interpolation_curve(ctx.model, ctx.params, trial, ctx.config.t_grid, ctx.method, opts);
  json j;
  j["suite"] = "interp";
  j["trial_x"] = ctx.config.trial_x;
  json curve = json::array();
  for (const auto& p : rep.curve) {
    json pt;
    pt["t"] = p.t;
    pt["pressure"] = estimate_to_json(p.pressure);
    curve.push_back(pt);
  }
  j["t_curve"] = curve;
  j["min_curvature"] = rep.min_curvature;
  j["convex_ok"] = rep.convex_ok;
  j["endpoints_ok"] = rep.endpoints_ok;
  j["endpoint0_error"] = rep.endpoint0_error;
  j["endpoint1_error"] = rep.endpoint1_error;
  j["tangent_ok"] = rep.tangent_ok;
  j["tangent_slack"] = rep.tangent_slack;
  ctx.add_check(std::move(j), rep.convex_ok && rep.endpoints_ok && rep.tangent_ok);
}

void run_meanfield(SuiteContext& ctx) {
  int z = ctx.config.z;
  if (z == 0) {
    z = ctx.model.graph.degree(0);
  }
  MeanFieldOptions opts;
  opts.m_max = ctx.config.m_max;
  if (ctx.config.tol) opts.gb.tol = *ctx.config.tol;
  const auto rep = rs_meanfield_bound(ctx.model, z, ctx.config.beta, ctx.method, opts);
  json j;
  j["suite"] = "meanfield";
  j["beta"] = rep.beta;
  j["z"] = rep.z;
  j["m_star"] = rep.m_star;
  j["rhs_at_m_star"] = rep.rhs_at_m_star;
  j["bound"] = gb_to_json(rep.bound);
  json scan = json::array();
  for (const auto& [m, v] : rep.scan) scan.push_back({m, v});
  j["m_scan"] = scan;
  double scan_max = -std::numeric_limits<double>::infinity();
  for (const auto& [m, v] : rep.scan) scan_max = std::max(scan_max, v);
  const bool maximal = rep.rhs_at_m_star >= scan_max - 1e-9 * (1.0 + std::abs(scan_max));
  j["maximal_on_scan"] = maximal;
  ctx.add_check(std::move(j), rep.bound.pass && maximal);
}

void write_curve_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  out.precision(17);
  for (const auto& check : report.document.at("checks")) {
    if (check.contains("t_curve")) {
      out << "t,pressure,std_error\n";
      for (const auto& pt : check.at("t_curve"))
        out << pt.at("t").get<double>() << "," << pt.at("pressure").at("value").get<double>()
            << "," << pt.at("pressure").at("std_error").get<double>() << "\n";
    }
    if (check.contains("m_scan")) {
      out << "m,rhs\n";
      for (const auto& pt : check.at("m_scan"))
        out << pt.at(0).get<double>() << "," << pt.at(1).get<double>() << "\n";
    }
  }
}

}  // namespace

json estimate_to_json(const QuenchedEstimate& e) {
  json j;
  j["value"] = e.value;
  j["std_error"] = e.std_error;
  j["n_effective"] = e.n_effective;
  j["method"] = method_to_json(e.method);
  if (std::isfinite(e.convergence_delta)) j["convergence_delta"] = e.convergence_delta;
  return j;
}

RunReport run_suite(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  auto [model, params] = model_from_json_file(config.model_path);
  if (config.seed) model.default_seed = *config.seed;

  SuiteContext ctx{config, model, params, method_from_config(config, model.default_seed)};

  const auto run_one = [&](const std::string& suite) {
    if (suite == "identities") {
      run_identities(ctx);
    } else if (suite == "thm1") {
      run_thm1(ctx);
    } else if (suite == "thm2") {
      run_thm2(ctx);
    } else if (suite == "hessian") {
      if (model.n_slots() > HessianOptions{}.max_slots)
        ctx.add_skip("hessian", "more slots than the hessian cap");
      else
        run_hessian(ctx);
    } else if (suite == "gb") {
      run_gb(ctx);
    } else if (suite == "interp") {
      run_interp(ctx);
    } else if (suite == "meanfield") {
      try {
        run_meanfield(ctx);
      } catch (const ConfigurationError& e) {
        if (config.suite == "all")
          ctx.add_skip("meanfield", e.what());
        else
          throw;
      }
    } else {
      throw ConfigurationError("unknown suite '" + suite + "'");
    }
  };

  if (config.suite == "all") {
    for (const char* s : {"identities", "thm1", "thm2", "hessian", "gb", "interp", "meanfield"})
      run_one(s);
  } else {
    run_one(config.suite);
  }

  RunReport report;
  report.checks = ctx.checks_n;
  report.passed = ctx.passed;
  report.failed = ctx.failed;
  report.controls = ctx.controls;
  report.control_violations = ctx.control_violations;

  json j;
  j["schema_version"] = 1;
  j["tool"] = "glasslab";
  j["version"] = kVersion;

  json cfg;
  cfg["model_path"] = config.model_path;
  cfg["suite"] = config.suite;
  cfg["method"] = method_to_json(ctx.method);
  cfg["bias_factor"] = config.bias_factor;
  cfg["t_grid"] = config.t_grid;
  cfg["m_max"] = config.m_max;
  cfg["trial_x"] = config.trial_x;
  cfg["z"] = config.z;
  cfg["beta"] = config.beta;
  cfg["max_pairs"] = config.max_pairs;
  if (config.tol) cfg["tol"] = *config.tol;
  cfg["workers"] = worker_count();
  j["config"] = cfg;

  json jm;
  jm["q"] = model.spin.q;
  jm["sites"] = model.graph.n_sites;
  json bonds = json::array();
  for (const auto& [a, b] : model.graph.bonds) bonds.push_back({a, b});
  jm["bonds"] = bonds;
  json slots = json::array();
  for (std::size_t i = 0; i < model.n_slots(); ++i) {
    json s = slot_to_json(model.slots[i]);
    s["x"] = params.x[i];
    slots.push_back(s);
  }
  jm["slots"] = slots;
  jm["seed"] = model.default_seed;
  j["model"] = jm;

  j["checks"] = ctx.checks;
  json summary;
  summary["checks"] = report.checks;
  summary["passed"] = report.passed;
  summary["failed"] = report.failed;
  summary["controls"] = report.controls;
  summary["control_violations"] = report.control_violations;
  j["summary"] = summary;

  const auto end = std::chrono::steady_clock::now();
  json meta;
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  meta["timestamp"] = buf;
  meta["wall_clock_s"] = std::chrono::duration<double>(end - start).count();
  j["meta"] = meta;

  report.document = std::move(j);
  return report;
}

std::string report_to_string(const RunReport& report) { return report.document.dump(2) + "\n"; }

void write_report(const RunReport& report, const RunConfig& config) {
  if (!config.out_path.empty()) {
    std::ofstream out(config.out_path);
    if (!out) throw ConfigurationError("cannot write report to " + config.out_path);
    out << report_to_string(report);
  }
  if (!config.csv_path.empty()) write_curve_csv(report, config.csv_path);
}

}  // namespace glasslab

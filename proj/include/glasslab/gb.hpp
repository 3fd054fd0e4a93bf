#pragma once

#include <functional>
#include <vector>

#include "glasslab/model.hpp"
#include "glasslab/quench.hpp"

namespace glasslab {

/// One-body trial potential: x values for site/harmonic slots, all >= 0.
struct TrialField {
  std::vector<CouplingSlot> slots;  // one-body slots
  std::vector<double> x;

  /// The same x on every site at one harmonic.
  static TrialField uniform(const ModelSpec& model, int harmonic, double x);
  void validate(const ModelSpec& model) const;
};

struct GBOptions {
  double tol = 1e-8;      // slack >= -max(tol, 3 sigma)
  int trial_nodes = 64;   // per-dim nodes for the factorized trial-side quadrature
};

/// Variational lower bound on the quenched pressure:
///   E[log Z] >= E[log Z_0] + (1/2) sum_slots x_s E[1 + <cos(slot)>_0]
///             - (1/2) sum_trial x_t E[1 + <cos(trial)>_0].
struct GBReport {
  QuenchedEstimate lhs;  // E[log Z] of the target model
  QuenchedEstimate rhs;  // bound value
  double slack = 0.0;    // lhs - rhs
  double slack_std_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

GBReport gb_bound(const ModelSpec& model, const NishimoriParams& params,
                  const TrialField& trial, const QuenchMethod& method,
                  const GBOptions& options = {});

/// E[log Z_0] and the trial-measure averages, evaluated by the full trial
/// model without site factorization (test oracle for small N, and the exact
/// Monte Carlo path).
QuenchedEstimate trial_pressure_direct(const ModelSpec& model, const TrialField& trial,
                                       const QuenchMethod& method);

struct InterpolationPoint {
  double t = 0.0;
  QuenchedEstimate pressure;  // E[log Z(t)]
};

struct InterpolationReport {
  std::vector<InterpolationPoint> curve;
  double min_curvature = 0.0;   // smallest second divided difference (x2)
  bool convex_ok = false;
  bool endpoints_ok = false;
  double endpoint0_error = 0.0;  // |curve(0) - E[log Z_0]|
  double endpoint1_error = 0.0;  // |curve(1) - E[log Z]|
  bool tangent_ok = false;
  double tangent_slack = 0.0;    // curve(1) - curve(0) - slope(0)
  double tolerance = 0.0;
};

/// E[log Z(t)] along the interpolation between the trial potential (t = 0)
/// and the target (t = 1): target slots carry t*x, trial slots (1-t)*x, all
/// points sharing the same disorder draws. Checks discrete convexity,
/// endpoint consistency, and the tangent inequality at t = 0.
InterpolationReport interpolation_curve(const ModelSpec& model, const NishimoriParams& params,
                                        const TrialField& trial, std::vector<double> t_grid,
                                        const QuenchMethod& method, const GBOptions& options = {});

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section maximization of a unimodal function on [a, b].
GoldenResult golden_section_max(const std::function<double(double)>& f, double a, double b,
                                double x_tol, int max_iterations = 400);

/// Replica-symmetric mean-field specialization: Ising target with x_ij =
/// beta^2 on every bond of a z-regular graph, trial x_i = beta^2 * z * M,
/// bound maximized over the magnetization-like parameter M.
struct MeanFieldReport {
  double beta = 0.0;
  int z = 0;
  double m_star = 0.0;
  double rhs_at_m_star = 0.0;
  GBReport bound;                               // at m_star
  std::vector<std::pair<double, double>> scan;  // (M, rhs) for plotting
};

struct MeanFieldOptions {
  double m_max = 2.0;
  double m_tol = 1e-6;
  int scan_points = 201;
  GBOptions gb;
};

MeanFieldReport rs_meanfield_bound(const ModelSpec& model, int z, double beta,
                                   const QuenchMethod& method,
                                   const MeanFieldOptions& options = {});

/// The bound's right-hand side as a function of M (exposed for scan oracles).
double rs_meanfield_rhs(const ModelSpec& model, double beta, int z, double m,
                        const GBOptions& options = {});

}  // namespace glasslab

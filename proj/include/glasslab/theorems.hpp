#pragma once

#include <vector>

#include <Eigen/Dense>

#include "glasslab/model.hpp"
#include "glasslab/quench.hpp"

namespace glasslab {

/// Comparison of a closed-form derivative of the quenched pressure
/// against its finite-difference estimate, on shared disorder draws.
struct DerivativeReport {
  CouplingSlot slot_a, slot_b;
  bool second_order = false;
  QuenchedEstimate analytic;        // closed-form side
  QuenchedEstimate fd_pressure;     // FD of E[log Z] (2*d2P for second order)
  QuenchedEstimate fd_correlation;  // second order only: d/dx_b of E[<cos a>]
  QuenchedEstimate residual;        // fd_pressure - analytic
  double fd_step = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool bound_ok = false;  // first order: analytic in [0,1]; second: analytic >= -tol
};

struct TheoremOptions {
  double fd_step_first = 1e-4;    // scaled by max(1, x)
  double fd_step_second = 5e-3;   // scaled by max(1, x)
  double fd_step_boundary = 1e-3; // one-sided second-derivative step near x = 0
  double tol_first = 1e-6;
  double tol_second = 1e-5;
};

/// First derivative: dP/dx_slot = (1/2) E[1 + <cos m(phi_i - phi_j)>],
/// monotonically increasing pressure, derivative in [0, 1].
DerivativeReport thm1_check(const ModelSpec& model, const NishimoriParams& params,
                            std::size_t slot_index, const QuenchMethod& method,
                            const TheoremOptions& options = {});

/// Second derivative: 2 d2P/dx_a dx_b equals the sum of four expected squared
/// truncated correlations (cos/sin x cos/sin), hence is non-negative.
DerivativeReport thm2_check(const ModelSpec& model, const NishimoriParams& params,
                            std::size_t slot_a, std::size_t slot_b, const QuenchMethod& method,
                            const TheoremOptions& options = {});

enum class HessianAssembly { FourSquares, CsAuxiliary, FiniteDifference };

const char* assembly_name(HessianAssembly a);

/// Hessian of the quenched pressure in x-space, assembled one of three ways;
/// convexity means it is positive semidefinite.
struct HessianReport {
  std::vector<CouplingSlot> slots;
  Eigen::MatrixXd matrix;       // d x d, symmetrized
  Eigen::MatrixXd std_errors;   // 0 under quadrature
  double min_eigenvalue = 0.0;
  double spectral_norm = 0.0;
  double max_asymmetry = 0.0;
  HessianAssembly assembly = HessianAssembly::FourSquares;
  bool psd_ok = false;
};

struct HessianOptions {
  TheoremOptions fd;
  double symmetry_tol = 1e-10;
  double psd_tol_scale = 1e-8;  // min eigenvalue >= -scale*(1 + spectral norm)
  std::size_t max_slots = 12;
};

HessianReport hessian_psd(const ModelSpec& model, const NishimoriParams& params,
                          const QuenchMethod& method, HessianAssembly assembly,
                          const HessianOptions& options = {});

}  // namespace glasslab

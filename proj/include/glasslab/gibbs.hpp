#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "glasslab/model.hpp"
#include "glasslab/observables.hpp"

namespace glasslab {

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t(1) << 20;

/// Random potential for one spin configuration in standardized form,
///   U = -sum_slots ( sqrt(x) J cos(m*ang) + sqrt(x) K sin(m*ang)
///                    + mean_bias * x * cos(m*ang) ),
/// where ang is the slot's oriented angle (difference). mean_bias = 1 is the
/// Nishimori line; other values shift the Gaussian mean off the line.
double evaluate_potential(const ModelSpec& model, const NishimoriParams& params,
                          const DisorderSample& sample, const std::vector<int>& config,
                          double mean_bias = 1.0);

class GibbsEvaluator;

/// Per-sample result of the exact Gibbs computation: log Z, the values of the
/// registered correlator products, and the row probabilities of the reduced
/// enumeration table (for custom kernels). Also owns the evaluation scratch,
/// so one GibbsState per thread makes evaluation thread-safe.
struct GibbsState {
  double log_z = 0.0;
  Eigen::VectorXd correlators;  // aligned with the evaluator's product list
  Eigen::VectorXd prob;         // per table row, sums to 1
  const GibbsEvaluator* evaluator = nullptr;

  double correlator(std::size_t product_index) const { return correlators[(Eigen::Index)product_index]; }

  // reusable buffers filled by GibbsEvaluator::evaluate
  Eigen::VectorXd coef_a, coef_b, energy;
};

/// Exact Gibbs computations on the enumerated configuration space.
///
/// Configurations are grouped by their integer signature (per table slot, the
/// residue m * delta mod q that determines every trig factor), so repeated
/// evaluation at different disorder costs O(rows) instead of O(q^N). Rows and
/// probabilities are exact; the grouping is exact integer arithmetic.
class GibbsEvaluator {
 public:
  GibbsEvaluator(const ModelSpec& model, std::vector<SiteObservable> products,
                 std::size_t enumeration_cap = kDefaultEnumerationCap);

  const ModelSpec& model() const { return model_; }
  const std::vector<SiteObservable>& products() const { return products_; }
  std::size_t n_rows() const { return (std::size_t)mult_.size(); }
  std::size_t n_table_slots() const { return table_slots_.size(); }

  /// Index of a slot in the table (model slots come first); -1 if absent.
  int table_slot_index(const CouplingSlot& slot) const;

  double cos_value(std::size_t row, std::size_t table_slot) const {
    return cosv_((Eigen::Index)row, (Eigen::Index)table_slot);
  }
  double sin_value(std::size_t row, std::size_t table_slot) const {
    return sinv_((Eigen::Index)row, (Eigen::Index)table_slot);
  }
  /// Integer signature m*delta mod q of a row at a table slot.
  int signature(std::size_t row, std::size_t table_slot) const {
    return sig_((Eigen::Index)row, (Eigen::Index)table_slot);
  }
  double multiplicity(std::size_t row) const { return mult_[(Eigen::Index)row]; }

  void evaluate(const NishimoriParams& params, const DisorderSample& sample,
                GibbsState& out, double mean_bias = 1.0) const;
  GibbsState evaluate(const NishimoriParams& params, const DisorderSample& sample,
                      double mean_bias = 1.0) const;

  /// Multi-replica thermal average at fixed disorder, by explicit enumeration
  /// over row tuples of `arity` independent replicas.
  double replica_average_direct(const GibbsState& state, const ReplicaPattern& pattern,
                                std::size_t replicated_cap = kDefaultEnumerationCap) const;

  /// The same average via the factorized expansion over single-replica
  /// correlators. Both paths must agree to enumeration accuracy.
  double replica_average_factorized(const GibbsState& state, const ReplicaPattern& pattern) const;

 private:
  ModelSpec model_;
  std::vector<SiteObservable> products_;
  std::vector<CouplingSlot> table_slots_;  // model slots, then observed-only slots
  Eigen::MatrixXd cosv_, sinv_;            // rows x table_slots
  Eigen::MatrixXi sig_;                    // rows x table_slots
  Eigen::MatrixXd obs_;                    // rows x products
  Eigen::VectorXd mult_;
};

/// User-facing result of exact_gibbs: log Z plus requested correlators
/// (single-replica cos/sin of every model slot is always included).
struct GibbsSolution {
  double log_z = 0.0;
  std::vector<std::pair<SiteObservable, double>> correlators;

  double correlator(const SiteObservable& o) const;
};

GibbsSolution exact_gibbs(const ModelSpec& model, const NishimoriParams& params,
                          const DisorderSample& sample,
                          const std::vector<SiteObservable>& requests = {},
                          std::size_t enumeration_cap = kDefaultEnumerationCap);

/// Multi-replica thermal average at fixed disorder; `factorized` selects the
/// evaluation path.
double replica_correlator(const ModelSpec& model, const NishimoriParams& params,
                          const DisorderSample& sample, const ReplicaPattern& pattern,
                          bool factorized = true,
                          std::size_t replicated_cap = kDefaultEnumerationCap);

/// Gauge transformation by site angles theta (state indices): spins rotate as
/// phi -> phi - theta while each slot's coupling amplitude, mean included,
/// rotates by m * (theta_a - theta_b). The potential is invariant:
/// U(phi - theta, transformed) = U(phi, original).
DisorderSample gauge_transform(const ModelSpec& model, const NishimoriParams& params,
                               const DisorderSample& sample, const std::vector<int>& theta);

}  // namespace glasslab

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "glasslab/gibbs.hpp"
#include "glasslab/model.hpp"

namespace glasslab {

inline constexpr double kQuadratureNodeCap = 1e7;

/// Disorder-averaging method: tensor Gauss-Hermite quadrature over the active
/// Gaussian dimensions, or counter-based Monte Carlo.
struct QuenchMethod {
  enum class Kind { Quadrature, MonteCarlo };
  Kind kind = Kind::Quadrature;
  int nodes_per_dim = 32;
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 0;

  static QuenchMethod quadrature(int nodes = 32);
  static QuenchMethod monte_carlo(std::int64_t n_samples, std::uint64_t seed);
  std::string describe() const;
};

struct QuenchedEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for quadrature
  std::int64_t n_effective = 0;
  QuenchMethod method;
  /// Quadrature convergence flag: |value(nodes) - value(nodes/2)|.
  double convergence_delta = std::numeric_limits<double>::quiet_NaN();
};

/// A scalar function of the per-sample Gibbs state whose disorder average is
/// requested.
struct ScalarObservable {
  std::string name;
  std::function<double(const GibbsState&)> fn;
};

/// A batched quenched-average computation: several parameter variants of one
/// model, several observables, one shared set of disorder draws (common
/// random numbers across variants by construction).
class QuenchJob {
 public:
  explicit QuenchJob(ModelSpec model);

  /// Registers a correlator product; returns its index for use in observable
  /// closures. Duplicate products share an index.
  std::size_t add_product(SiteObservable product);
  std::size_t add_observable(ScalarObservable obs);
  /// Convenience: observable returning a registered product's thermal average.
  std::size_t add_correlator_observable(const SiteObservable& product);
  std::size_t add_pressure_observable();
  std::size_t add_variant(NishimoriParams params);

  void set_mean_bias(double bias) { mean_bias_ = bias; }
  void set_enumeration_cap(std::size_t cap) { enumeration_cap_ = cap; }
  /// Optional CSV stream of per-draw observable values.
  void set_sample_csv(std::string path) { csv_path_ = std::move(path); }

  std::size_t n_variants() const { return variants_.size(); }
  std::size_t n_observables() const { return observables_.size(); }
  const ModelSpec& model() const { return model_; }

  class Result;
  Result run(const QuenchMethod& method) const;

 private:
  ModelSpec model_;
  std::vector<SiteObservable> products_;
  std::vector<ScalarObservable> observables_;
  std::vector<NishimoriParams> variants_;
  double mean_bias_ = 1.0;
  std::size_t enumeration_cap_ = kDefaultEnumerationCap;
  std::string csv_path_;
};

class QuenchJob::Result {
 public:
  QuenchedEstimate estimate(std::size_t variant, std::size_t observable) const;

  /// Estimate of sum_i coeff_i * E[obs_i at variant_i], with the uncertainty
  /// of the combination computed from the shared draws (exact covariance
  /// handling under common random numbers).
  struct Term {
    std::size_t variant;
    std::size_t observable;
    double coeff;
  };
  QuenchedEstimate combine(const std::vector<Term>& terms) const;

  std::int64_t n_effective() const { return n_effective_; }

 private:
  friend class QuenchJob;
  QuenchMethod method_;
  std::size_t n_variants_ = 0, n_observables_ = 0;
  std::int64_t n_effective_ = 0;
  // quadrature: values at full and half node count
  std::vector<double> value_, value_half_;
  // Monte Carlo: per-batch sums, indexed [batch][variant*obs]
  std::vector<std::vector<double>> batch_sums_;
  std::size_t batch_size_ = 0;

  double mc_mean(const std::vector<Term>& terms) const;
};

/// E[observable]; `products` are the correlators the observable reads.
QuenchedEstimate quenched_average(const ModelSpec& model, const NishimoriParams& params,
                                  const std::vector<SiteObservable>& products,
                                  const std::function<double(const GibbsState&)>& fn,
                                  const QuenchMethod& method);

/// E[log Z].
QuenchedEstimate quenched_pressure(const ModelSpec& model, const NishimoriParams& params,
                                   const QuenchMethod& method);

/// E[log Z] for every parameter set, all evaluated on identical disorder
/// draws, so differences between the estimates have strongly reduced variance.
std::vector<QuenchedEstimate> common_random_numbers(const ModelSpec& model,
                                                    const std::vector<NishimoriParams>& params_list,
                                                    const QuenchMethod& method);

}  // namespace glasslab

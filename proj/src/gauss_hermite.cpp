#include "glasslab/gauss_hermite.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Dense>

#include "glasslab/errors.hpp"

namespace glasslab {

namespace {

GaussHermiteRule compute(int n) {
  // Jacobi matrix of the monic Hermite_e polynomials: zero diagonal,
  // off-diagonal sqrt(k). Eigenvalues are the nodes; the squared first
  // components of the normalized eigenvectors are the weights (mu_0 = 1).
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt((double)k);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  if (es.info() != Eigen::Success)
    throw NumericalError("Gauss-Hermite eigenvalue computation failed");
  GaussHermiteRule rule;
  rule.nodes.resize((std::size_t)n);
  rule.weights.resize((std::size_t)n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[(std::size_t)i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[(std::size_t)i] = v0 * v0;
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  if (n < 1) throw ConfigurationError("Gauss-Hermite rule requires n >= 1");
  static std::mutex mu;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute(n)).first;
  return it->second;
}

}  // namespace glasslab

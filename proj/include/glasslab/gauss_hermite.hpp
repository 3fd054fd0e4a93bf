#pragma once

#include <vector>

namespace glasslab {

/// Nodes and weights for E[f(X)] with X ~ N(0,1):
///   E[f] ~= sum_i weights[i] * f(nodes[i]),  sum weights = 1.
/// Probabilists' Gauss-Hermite rule, computed by the Golub-Welsch method.
struct GaussHermiteRule {
  std::vector<double> nodes;    // ascending, symmetric about 0
  std::vector<double> weights;  // positive
};

/// n >= 1; results are cached per n.
const GaussHermiteRule& gauss_hermite(int n);

}  // namespace glasslab

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace glasslab {

/// Discrete spin space Z_q: site states are the angles 2*pi*k/q, k = 0..q-1,
/// under the uniform counting measure. q = 2 is the Ising case; a large q
/// approximates the continuous XY circle.
struct SpinSpace {
  int q = 2;

  double angle(int state) const;
  /// cos(2*pi*s/q) with exact values at the lattice points where the result
  /// is 0 or +-1, so that e.g. the Ising sin channel vanishes identically.
  double cos_state(int state) const;
  double sin_state(int state) const;
};

/// Sites and unordered bonds; arbitrary structure, free boundaries.
struct BondGraph {
  int n_sites = 0;
  std::vector<std::pair<int, int>> bonds;        // normalized a < b, no duplicates
  std::vector<int> one_body_sites;               // sites carrying one-body terms

  int degree(int site) const;
};

/// One coupling term: a bond (site_a, site_b) or a single site (site_b = -1),
/// together with the harmonic index m. Bonds are stored with site_a < site_b,
/// which fixes the orientation used for the angle difference.
struct CouplingSlot {
  int site_a = 0;
  int site_b = -1;  // -1 => one-body
  int harmonic = 1;

  bool one_body() const { return site_b < 0; }
  static CouplingSlot bond(int i, int j, int m);
  static CouplingSlot site(int i, int m);
  std::string label() const;

  friend auto operator<=>(const CouplingSlot&, const CouplingSlot&) = default;
};

/// The one free parameter per slot on the Nishimori line, x = beta*D =
/// sigma^2*beta^2 >= 0. Values are aligned with ModelSpec::slots; a slot is
/// active iff its x > 0.
struct NishimoriParams {
  std::vector<double> x;

  static NishimoriParams zeros(std::size_t n_slots);
  static NishimoriParams uniform(std::size_t n_slots, double value);
  NishimoriParams with(std::size_t slot_index, double value) const;
  NishimoriParams shifted(std::size_t slot_index, double delta) const;
};

/// Boundary representation of a coupling as the (beta, sigma^2, D) triple.
/// Only valid on the Nishimori line, where D/sigma^2 = beta; the triple is
/// redundant there and collapses to x = beta*D.
struct CanonicalCoupling {
  double beta = 1.0;
  double sigma2 = 1.0;
  double mean = 1.0;

  /// Throws ConfigurationError unless |mean/sigma2 - beta| <= 1e-12*beta.
  double to_x() const;
};

/// A complete model: spin space, bond graph, and the declared coupling slots.
struct ModelSpec {
  SpinSpace spin;
  BondGraph graph;
  std::vector<CouplingSlot> slots;
  std::uint64_t default_seed = 0;

  int n_sites() const { return graph.n_sites; }
  std::size_t n_slots() const { return slots.size(); }
  /// Index of a slot in `slots`, or -1 if absent.
  int find_slot(const CouplingSlot& slot) const;

  /// Validates structural invariants; throws ConfigurationError on violation.
  void validate() const;

  /// Builders for the common desk-scale instances.
  static ModelSpec single_bond(int q, int m = 1);
  static ModelSpec chain(int q, int n_sites, int m = 1);
  static ModelSpec ring(int q, int n_sites, int m = 1);
};

/// Standardized disorder realization: independent standard Gaussians (J, K)
/// per declared slot, aligned with ModelSpec::slots.
struct DisorderSample {
  std::vector<double> j;
  std::vector<double> k;

  static DisorderSample zeros(std::size_t n_slots);
};

/// Parses the model document {spin_space:{q}, sites, bonds, slots, seed}.
/// Returns the model and the slot parameters (the per-slot x values).
std::pair<ModelSpec, NishimoriParams> model_from_json(const std::string& text);
std::pair<ModelSpec, NishimoriParams> model_from_json_file(const std::string& path);

}  // namespace glasslab

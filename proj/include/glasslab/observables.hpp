#pragma once

#include <map>
#include <string>
#include <vector>

#include "glasslab/model.hpp"

namespace glasslab {

enum class Trig { Cos, Sin };

/// One factor trig(m * angle), where angle is the slot's oriented angle
/// difference (two-body) or the site angle (one-body).
struct TrigAtom {
  CouplingSlot slot;
  Trig trig = Trig::Cos;

  friend auto operator<=>(const TrigAtom&, const TrigAtom&) = default;
};

/// A product of trig atoms evaluated on a single spin configuration; its
/// thermal average is a single-replica correlator. An empty product is the
/// constant 1.
struct SiteObservable {
  std::vector<TrigAtom> atoms;

  static SiteObservable one(TrigAtom a);
  static SiteObservable pair(TrigAtom a, TrigAtom b);
  SiteObservable& operator*=(TrigAtom a);
  void canonicalize();  // sorts atoms so equal products compare equal
  std::string label() const;

  friend auto operator<=>(const SiteObservable&, const SiteObservable&) = default;
};

inline TrigAtom cos_of(CouplingSlot slot) { return TrigAtom{slot, Trig::Cos}; }
inline TrigAtom sin_of(CouplingSlot slot) { return TrigAtom{slot, Trig::Sin}; }

/// One factor of a multi-replica observable: trig(m * angle^{rep_a}) when
/// rep_b < 0, else trig(m * (angle^{rep_a} - angle^{rep_b})).
struct ReplicaFactor {
  CouplingSlot slot;
  Trig trig = Trig::Cos;
  int rep_a = 0;
  int rep_b = -1;
};

/// Product of replica factors; replica indices are 0-based and the arity is
/// max index + 1 (at most 4 supported by the direct path).
struct ReplicaPattern {
  std::vector<ReplicaFactor> factors;

  int arity() const;
  std::string label() const;

  /// cos(m(angle^r - angle^s)) of one slot.
  static ReplicaPattern overlap_cos(CouplingSlot slot, int r, int s);
  /// product of two replica-difference cosines.
  static ReplicaPattern overlap_cos_pair(CouplingSlot a, int ra, int sa,
                                         CouplingSlot b, int rb, int sb);
};

/// One term of the factorized expansion of a ReplicaPattern: a coefficient
/// times a product of per-replica single-replica observables.
struct ExpandedTerm {
  double coeff = 1.0;
  std::map<int, SiteObservable> by_replica;
};

/// Expands replica-difference trig factors via the angle-addition formulas
/// and groups atoms by replica. Because replicas are independent copies
/// sharing the disorder, the pattern's thermal average is
///   sum_terms coeff * prod_r <by_replica[r]>.
std::vector<ExpandedTerm> expand_pattern(const ReplicaPattern& pattern);

}  // namespace glasslab

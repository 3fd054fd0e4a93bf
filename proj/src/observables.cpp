#include "glasslab/observables.hpp"

#include <algorithm>

#include "glasslab/errors.hpp"

namespace glasslab {

SiteObservable SiteObservable::one(TrigAtom a) { return SiteObservable{{a}}; }

SiteObservable SiteObservable::pair(TrigAtom a, TrigAtom b) {
  SiteObservable o{{a, b}};
  o.canonicalize();
  return o;
}

SiteObservable& SiteObservable::operator*=(TrigAtom a) {
  atoms.push_back(a);
  canonicalize();
  return *this;
}

void SiteObservable::canonicalize() { std::sort(atoms.begin(), atoms.end()); }

std::string SiteObservable::label() const {
  if (atoms.empty()) return "1";
  std::string s;
  for (const auto& a : atoms) {
    if (!s.empty()) s += "*";
    s += (a.trig == Trig::Cos ? "cos[" : "sin[") + a.slot.label() + "]";
  }
  return s;
}

int ReplicaPattern::arity() const {
  int k = 0;
  for (const auto& f : factors) k = std::max({k, f.rep_a + 1, f.rep_b + 1});
  return k;
}

std::string ReplicaPattern::label() const {
  std::string s;
  for (const auto& f : factors) {
    if (!s.empty()) s += "*";
    s += (f.trig == Trig::Cos ? "cos" : "sin");
    s += "(" + f.slot.label();
    if (f.rep_b >= 0)
      s += ":r" + std::to_string(f.rep_a + 1) + "-r" + std::to_string(f.rep_b + 1);
    else
      s += ":r" + std::to_string(f.rep_a + 1);
    s += ")";
  }
  return s;
}

ReplicaPattern ReplicaPattern::overlap_cos(CouplingSlot slot, int r, int s) {
  return ReplicaPattern{{ReplicaFactor{slot, Trig::Cos, r, s}}};
}

ReplicaPattern ReplicaPattern::overlap_cos_pair(CouplingSlot a, int ra, int sa,
                                                CouplingSlot b, int rb, int sb) {
  return ReplicaPattern{{ReplicaFactor{a, Trig::Cos, ra, sa},
                         ReplicaFactor{b, Trig::Cos, rb, sb}}};
}

std::vector<ExpandedTerm> expand_pattern(const ReplicaPattern& pattern) {
  if (pattern.arity() > 4)
    throw ConfigurationError("replica patterns support at most 4 replicas");
  std::vector<ExpandedTerm> terms{ExpandedTerm{}};
  for (const auto& f : pattern.factors) {
    if (f.rep_a < 0) throw ConfigurationError("replica index must be >= 0");
    std::vector<ExpandedTerm> next;
    next.reserve(terms.size() * 2);
    // Pieces of the factor: (coeff, atom on rep_a, optional atom on rep_b).
    struct Piece {
      double c;
      Trig ta;
      Trig tb;
      bool has_b;
    };
    std::vector<Piece> pieces;
    if (f.rep_b < 0) {
      pieces.push_back({1.0, f.trig, Trig::Cos, false});
    } else if (f.trig == Trig::Cos) {
      // cos(A - B) = cosA cosB + sinA sinB
      pieces.push_back({1.0, Trig::Cos, Trig::Cos, true});
      pieces.push_back({1.0, Trig::Sin, Trig::Sin, true});
    } else {
      // sin(A - B) = sinA cosB - cosA sinB
      pieces.push_back({1.0, Trig::Sin, Trig::Cos, true});
      pieces.push_back({-1.0, Trig::Cos, Trig::Sin, true});
    }
    for (const auto& t : terms) {
      for (const auto& p : pieces) {
        ExpandedTerm e = t;
        e.coeff *= p.c;
        e.by_replica[f.rep_a] *= TrigAtom{f.slot, p.ta};
        if (p.has_b) e.by_replica[f.rep_b] *= TrigAtom{f.slot, p.tb};
        next.push_back(std::move(e));
      }
    }
    terms = std::move(next);
  }
  return terms;
}

}  // namespace glasslab

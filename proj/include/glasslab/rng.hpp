#pragma once

#include <cstdint>

#include "glasslab/model.hpp"

namespace glasslab {

/// Quantile function of the standard normal (Wichura's AS 241, double
/// precision). u in (0,1).
double normal_quantile(double u);

/// Stateless, counter-based random streams: every draw is addressed by
/// (seed, stream, index), so any sample can be regenerated in isolation and
/// parallel evaluation order cannot change the values.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  /// Uniform in (0,1), strictly excluding the endpoints.
  double uniform(std::uint64_t stream, std::uint64_t index) const;
  /// Standard normal via the quantile function.
  double normal(std::uint64_t stream, std::uint64_t index) const;

  /// Stable stream identity for a slot's J (role 0) or K (role 1) channel,
  /// derived from the slot's sites and harmonic.
  static std::uint64_t slot_stream(const CouplingSlot& slot, int role);

 private:
  std::uint64_t seed_;
};

/// 64-bit finalizer/avalanche mix (SplitMix64 increment + finalizer).
std::uint64_t mix64(std::uint64_t z);

}  // namespace glasslab

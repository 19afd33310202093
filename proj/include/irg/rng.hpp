// Deterministic random number generation.
//
// The project needs bit-level reproducibility across runs, worker counts and
// (ideally) platforms, so everything randomness-related is pinned down here:
// a counter-based generator, a documented seed-derivation scheme for replica
// streams, and Poisson sampling that does not depend on the standard
// library's unspecified distribution algorithms.
#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "irg/common.hpp"

namespace irg {

// SplitMix64: a counter-based 64-bit generator. The state walks a Weyl
// sequence (seed + n * 0x9E3779B97F4A7C15) and each output is an avalanche
// mix of the state, so draw number n is a pure function of (seed, n).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double next_double_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard exponential via inverse CDF.
  double exponential() { return -std::log(next_double_pos()); }

  // Uniform integer in [0, bound), unbiased (Lemire's multiply-reject).
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw UsageError("Rng::next_below: bound must be positive");
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t t = (0 - bound) % bound;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

// Stable seed derivation for replica streams: FNV-1a over the task id,
// mixed with the master seed and the replica index through the SplitMix64
// finalizer. Replicas are independent of worker count and schedule because
// each one derives its stream from (master_seed, task_id, index) alone.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view task_id,
                          std::uint64_t index);

// Poisson sample. Knuth's product method below mean 10, Hormann's PTRS
// transformed rejection above. Implemented here (rather than
// std::poisson_distribution) so results do not depend on the C++ runtime.
std::int64_t sample_poisson(Rng& rng, double mean);

}  // namespace irg

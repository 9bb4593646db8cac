#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace endorse {

/// SplitMix64 finalizer; used to derive independent seeds from (seed, stream).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/**
 * Deterministic random source. The engine is std::mt19937_64, whose output
 * sequence is fixed by the standard; draws are derived from raw engine output
 * so that results do not depend on the standard library's distributions.
 *
 * `Rng::for_step(seed, t)` gives the stream used at simulation step t, so the
 * pair (seed, t) reproduces that step's update matrix on its own.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    static Rng for_step(std::uint64_t seed, std::uint64_t t) { return Rng(seed, t + 1); }

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n);

    double normal();

  private:
    std::mt19937_64 engine_;
};

} // namespace endorse

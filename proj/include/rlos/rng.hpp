#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>

namespace rlos {

/**
 * Counter-based random stream.
 *
 * A stream is identified by a seed plus a key path (for example
 * {level, realization}); the n-th draw is a pure function of
 * (seed, path, n). Streams therefore do not depend on how work is split
 * across threads.
 *
 * Uniforms are the top 53 bits of a SplitMix64 finalizer applied to the
 * stream key xor'ed with the golden-ratio-weighted counter. Gaussians use
 * the Box-Muller transform on consecutive uniform pairs; each complex draw
 * consumes exactly two uniforms. This method is part of the output contract:
 * changing it changes every Monte-Carlo fixture.
 */
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1).
    double next_uniform();

    /// Pair of independent standard normals packed as real/imag parts.
    std::complex<double> next_complex_gaussian();

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rlos

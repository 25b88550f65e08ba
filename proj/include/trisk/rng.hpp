// Counter-based deterministic random generator (Philox4x32 with 10 rounds).
//
// This is the single random source for the whole repo. Streams are addressed
// as (seed, stream): the 64-bit key carries the seed, the 128-bit counter
// carries the stream id in its high half and the draw position in its low
// half. Draws therefore depend only on (seed, stream, position) and never on
// thread scheduling, and ports in other languages can replicate sequences
// from this description plus the frozen values in the test suite.
//
// Round function, applied 10 times to the state (c0, c1, c2, c3) with key
// (k0, k1):
//   hi0:lo0 = 0xD2511F53 * c0      hi1:lo1 = 0xCD9E8D57 * c2
//   state  <- (hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0)
//   k0 += 0x9E3779B9, k1 += 0xBB67AE85
//
// Uniforms map two output words to a double in [0, 1) through the top 53
// bits; normals use one block per draw via Box-Muller (cosine branch).
#pragma once

#include <array>
#include <cstdint>

namespace trisk {

class PhiloxRng {
public:
    explicit PhiloxRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    static std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t stream,
                                              std::uint64_t position);

    // Uniform in [0, 1).
    double next_double();

    // Standard normal via Box-Muller; consumes one counter block.
    double next_normal();

    std::uint64_t next_u64();

    // Uniform integer in [0, n); n must be positive.
    std::uint64_t next_below(std::uint64_t n);

    std::uint64_t position() const { return position_; }

private:
    std::array<std::uint32_t, 4> next_block() { return block(seed_, stream_, position_++); }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t position_ = 0;
};

}  // namespace trisk

#include "trisk/rng.hpp"

#include <cmath>

namespace trisk {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline double to_unit_double(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t v = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(v >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> PhiloxRng::block(std::uint64_t seed, std::uint64_t stream,
                                              std::uint64_t position) {
    std::array<std::uint32_t, 4> c = {
        static_cast<std::uint32_t>(position), static_cast<std::uint32_t>(position >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);

    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return c;
}

double PhiloxRng::next_double() {
    const auto b = next_block();
    return to_unit_double(b[0], b[1]);
}

double PhiloxRng::next_normal() {
    const auto b = next_block();
    // Shift u1 into (0, 1] so the log stays finite.
    const double u1 =
        (static_cast<double>((((static_cast<std::uint64_t>(b[0]) << 32) | b[1]) >> 11) + 1)) *
        0x1.0p-53;
    const double u2 = to_unit_double(b[2], b[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::uint64_t PhiloxRng::next_u64() {
    const auto b = next_block();
    return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
}

std::uint64_t PhiloxRng::next_below(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64 in every
    // use (symbol picks, restart counts), so the bias is unobservable.
    return next_u64() % n;
}

}  // namespace trisk

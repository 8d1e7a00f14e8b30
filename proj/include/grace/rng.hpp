#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace grace {

// Deterministic random numbers. The standard distributions are
// implementation-defined, so all draws are derived from raw mt19937_64
// output to keep results bit-identical across toolchains.
class Prng {
public:
    explicit Prng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform index in [0, n). n must be > 0.
    std::size_t index(std::size_t n) {
        auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    /// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 gen_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}
} // namespace detail

/// Mixes a master seed with stream identifiers into an independent sub-seed.
/// Used to give every (iteration, pose) pair its own RNG stream so results
/// do not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = detail::splitmix64(master);
    s = detail::splitmix64(s ^ (a + 0x9E3779B97F4A7C15ull));
    s = detail::splitmix64(s ^ (b + 0xD1B54A32D192ED03ull));
    s = detail::splitmix64(s ^ (c + 0x8CB92BA72F3D8DD7ull));
    return s;
}

} // namespace grace

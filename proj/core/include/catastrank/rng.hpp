#pragma once

#include <cmath>
#include <cstdint>

namespace catastrank {

/// Deterministic splitmix64 generator. Used instead of <random> distributions
/// because std distribution output is implementation-defined; the whole
/// pipeline promises bit-identical results for a given seed on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Standard normal via Box-Muller; draws two uniforms per call.
    double next_normal() {
        double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::uint64_t state_;
};

/// Mixes a stream tag into a seed so that sub-tasks (folds, multistart,
/// per-feature fits) get independent deterministic streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    Rng r(seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL));
    r.next_u64();
    return r.next_u64();
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

}  // namespace catastrank

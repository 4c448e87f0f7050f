#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace asyncqp {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based stream: the draw for (seed, a, b, c) is a pure function of
// its arguments, so schedule and delay draws are independent of evaluation
// order. That keeps traces platform-stable and lets the parallel executor
// draw without shared state.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

inline double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double counter_u01(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0) {
    return to_unit(counter_hash(seed, a, b, c));
}

/// Uniform integer in [lo, hi], inclusive.
inline long counter_int(std::uint64_t seed, long lo, long hi, std::uint64_t a,
                        std::uint64_t b = 0, std::uint64_t c = 0) {
    const double u = counter_u01(seed, a, b, c);
    long v = lo + static_cast<long>(u * static_cast<double>(hi - lo + 1));
    return v > hi ? hi : v;
}

/// Sequential seeded stream with portable distributions (std:: distribution
/// objects are implementation-defined; these are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double u01() { return to_unit(engine_()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    long uniform_int(long lo, long hi) {
        long v = lo + static_cast<long>(u01() * static_cast<double>(hi - lo + 1));
        return v > hi ? hi : v;
    }

    // Box-Muller; one value per call, the twin is discarded.
    double gaussian() {
        double u1 = u01();
        while (u1 <= 0.0) u1 = u01();
        const double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace asyncqp

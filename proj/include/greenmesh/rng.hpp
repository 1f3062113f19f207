#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace greenmesh {

// Deterministic random source. All randomness in the library flows through
// this wrapper so results are bit-reproducible for a given seed across
// platforms: we use mt19937_64's raw output (which the standard pins down
// exactly) and do our own mapping to doubles instead of going through
// std::uniform_real_distribution, whose algorithm is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // int in [lo, hi] inclusive. Modulo bias is < 2^-53 for any range that
    // fits a double index, fine for simulation work.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const double span = static_cast<double>(hi - lo) + 1.0;
        auto off = static_cast<std::int64_t>(uniform01() * span);
        if (off >= hi - lo + 1) off = hi - lo; // guard the ==1.0 edge
        return lo + off;
    }

    // Box-Muller, one value per call (the cosine branch).
    double gauss(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586476925286766559;
        return mean + stddev * (r * std::cos(two_pi * u2));
    }

    // Derive an independent stream (e.g. per site) without correlating
    // successive seeds.
    Rng fork(std::uint64_t salt) {
        std::uint64_t s = eng_();
        s ^= salt + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
        return Rng(s);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace greenmesh

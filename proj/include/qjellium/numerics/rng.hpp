#pragma once

#include <cmath>
#include <cstdint>

namespace qjellium::num {

// Deterministic, platform-independent generator (xoshiro256++ seeded through
// splitmix64).  std::mt19937 + std::uniform_real_distribution are avoided on
// purpose: their stream is implementation-defined and the verify reports must
// be byte-identical for a given seed everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = splitmix(x);
        has_cached_normal_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1) with 53 random bits
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
    }

    double normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * uniform();
        cached_normal_ = r * std::sin(phi);
        has_cached_normal_ = true;
        return r * std::cos(phi);
    }

    // Independent stream derived from the base seed only, so that instance k of a
    // sweep sees the same numbers no matter how the sweep is scheduled.
    Rng fork(std::uint64_t stream) const {
        std::uint64_t x = stream + 0x632BE59BD9B4E019ULL;
        return Rng(seed_ ^ splitmix(x));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_;
};

} // namespace qjellium::num

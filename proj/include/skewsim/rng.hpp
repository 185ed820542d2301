#ifndef SKEWSIM_RNG_HPP
#define SKEWSIM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace skewsim {

/** SplitMix64 step; used only to expand seeds into full RNG states. */
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/**
 * xoshiro256++ with a Box-Muller normal generator.
 *
 * Streams are derived from (master seed, stream index) only, so path i
 * always sees the same draw sequence no matter how work is split across
 * threads. That is the whole reproducibility story: simulate path-by-path,
 * one stream per path, never share a stream.
 */
class Rng {
public:
    Rng() : Rng(0, 0) {}

    Rng(std::uint64_t master_seed, std::uint64_t stream) {
        // Distinct streams: offset the SplitMix64 state by the stream index
        // times a large odd constant before expansion.
        std::uint64_t sm = master_seed + (stream + 1) * 0xD1B54A32D192ED03ULL;
        for (auto& w : s_) w = splitmix64(sm);
        has_spare_ = false;
        spare_ = 0.0;
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

    /** Uniform on (0,1); never returns 0 so log() is safe. */
    double uniform() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    /** Standard normal via Box-Muller, second draw cached. */
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /** Bernoulli(p) from one uniform. */
    bool bernoulli(double p) { return uniform() < p; }

    /** Uniform integer in [0, n). Small modulo bias is irrelevant here
     *  (n is always far below 2^64); used for bootstrap resampling. */
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    double spare_;
    bool has_spare_;
};

} // namespace skewsim

#endif

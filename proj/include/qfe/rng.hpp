#pragma once

#include <cmath>
#include <cstdint>

namespace qfe {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Counter-free xoshiro256** generator addressed by (seed, stream_id).
/// Identical (seed, stream_id) pairs produce identical sequences no matter
/// how calls are interleaved across streams or threads, which is what the
/// campaign reproducibility contract requires. Streams are derived, never
/// advanced from a shared engine.
class SeededRng {
public:
    SeededRng() : SeededRng(0, 0) {}

    SeededRng(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t sm = seed ^ (stream_id * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL);
        for (auto& word : s_) word = detail::splitmix64(sm);
        have_spare_ = false;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Fork a child stream; the child is independent of this stream's
    /// position, so derivation order does not matter.
    SeededRng derive(std::uint64_t substream) const {
        std::uint64_t mix = stream_id_;
        mix = mix * 0x9e3779b97f4a7c15ULL + substream + 1;
        return SeededRng(seed_, detail::splitmix64(mix));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal deviate, Marsaglia polar method. Hand-rolled so the
    /// byte-identical-output guarantee does not depend on the stdlib's
    /// normal_distribution implementation.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace qfe

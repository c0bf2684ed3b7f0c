#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace psml {

namespace detail {

// SplitMix64 step, used for stream derivation and state seeding.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Splittable pseudo-random stream (xoshiro256++ core).
///
/// Streams are addressed, not shared: every (trial, iteration, draw)
/// consumer derives its own child via split(), so results never depend
/// on scheduling or worker count. split() is const and does not advance
/// the parent stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(seed) { reseed(); }

    /// Derived independent stream; distinct labels give distinct streams.
    Rng split(std::uint64_t label) const {
        std::uint64_t s = key_;
        std::uint64_t mixed = detail::splitmix64(s) ^ (label * 0xd1342543de82ef95ULL);
        std::uint64_t t = mixed;
        return Rng(detail::splitmix64(t));
    }

    /// Convenience for multi-part addresses: derive(seed, {a, b, c}).
    static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        Rng r(seed);
        for (std::uint64_t p : path) r = r.split(p);
        return r;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal draw (Marsaglia polar, spare value cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n).
    int uniform_int(int n) {
        return static_cast<int>(uniform() * static_cast<double>(n)) % n;
    }

    std::uint64_t key() const { return key_; }

private:
    void reseed() {
        std::uint64_t s = key_;
        for (auto& word : s_) word = detail::splitmix64(s);
    }

    std::array<std::uint64_t, 4> s_{};
    std::uint64_t key_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace psml

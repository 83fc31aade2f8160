#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace rhl {

// All randomness in the library flows through this generator so that a
// (config, seed) pair reproduces byte-identical streams on any platform and
// any worker count. The standard library distributions are not pinned by the
// standard, so uniform and normal conversion are done by hand.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        has_spare_ = false;
    }

    std::uint64_t u64() {
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

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1], safe as a log argument.
    double uniform_pos() { return static_cast<double>((u64() >> 11) + 1) * 0x1.0p-53; }

    // Box-Muller with a cached spare, fully determined by the stream.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    void fill_normal(double* out, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) out[i] = normal();
    }

    std::vector<double> unit_vector(int d) {
        std::vector<double> v(static_cast<std::size_t>(d));
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& c : v) {
                c = normal();
                norm2 += c * c;
            }
        } while (norm2 < 1e-24);
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& c : v) c *= inv;
        return v;
    }

    bool coin(double p_heads = 0.5) { return uniform() < p_heads; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_;
};

// Stable stream derivation: children are indexed substreams of a master seed.
// Tags keep unrelated consumers (oracle draws, flip coins, walk restarts) on
// disjoint streams even when their indices collide.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0) {
    std::uint64_t st = seed;
    std::uint64_t a = splitmix64(st);
    st = a ^ (tag * 0xD1342543DE82EF95ULL + 0x63652362B1137F4DULL);
    std::uint64_t b = splitmix64(st);
    st = b ^ (index * 0x2545F4914F6CDD1DULL + 0x9E6C63D0876A9A75ULL);
    return splitmix64(st);
}

inline Rng derive_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0) {
    return Rng(derive_seed(seed, tag, index));
}

// Fixed stream tags. Values are arbitrary but frozen; changing them changes
// every derived stream.
namespace stream {
constexpr std::uint64_t kOracleX = 0x01;
constexpr std::uint64_t kOracleLabel = 0x02;
constexpr std::uint64_t kOracleReject = 0x03;
constexpr std::uint64_t kWalkInit = 0x10;
constexpr std::uint64_t kWalkCoin = 0x11;
constexpr std::uint64_t kWalkBatch = 0x12;
constexpr std::uint64_t kWalkCheck = 0x13;
constexpr std::uint64_t kDirectionCoin = 0x14;
constexpr std::uint64_t kDirectionSpan = 0x15;
constexpr std::uint64_t kEasycase = 0x16;
constexpr std::uint64_t kLearnTop = 0x17;
constexpr std::uint64_t kEval = 0x20;
constexpr std::uint64_t kSweep = 0x21;
constexpr std::uint64_t kGen = 0x22;
constexpr std::uint64_t kOrtho = 0x23;
constexpr std::uint64_t kEmbed = 0x24;
}  // namespace stream

}  // namespace rhl

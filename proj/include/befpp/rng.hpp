#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace befpp {

// Philox4x32-10 counter-based generator. Each (seed, replica, label) triple
// selects an independent stream through the key, so Monte Carlo replicas can
// be dealt to worker threads in any order and still reproduce bit-identically.
class Philox4x32 {
public:
    Philox4x32() = default;
    Philox4x32(uint32_t key0, uint32_t key1) : key_{key0, key1} {}

    static std::array<uint32_t, 4> block(const std::array<uint32_t, 4>& ctr,
                                         const std::array<uint32_t, 2>& key) {
        std::array<uint32_t, 4> c = ctr;
        std::array<uint32_t, 2> k = key;
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = uint64_t{0xD2511F53u} * c[0];
            const uint64_t p1 = uint64_t{0xCD9E8D57u} * c[2];
            const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
            const uint32_t lo0 = static_cast<uint32_t>(p0);
            const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
            const uint32_t lo1 = static_cast<uint32_t>(p1);
            c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
            k[0] += 0x9E3779B9u;
            k[1] += 0xBB67AE85u;
        }
        return c;
    }

    uint32_t next_u32() {
        if (pos_ == 4) {
            out_ = block(ctr_, key_);
            pos_ = 0;
            // 128-bit counter increment
            if (++ctr_[0] == 0 && ++ctr_[1] == 0 && ++ctr_[2] == 0) ++ctr_[3];
        }
        return out_[pos_++];
    }

private:
    std::array<uint32_t, 2> key_{0, 0};
    std::array<uint32_t, 4> ctr_{0, 0, 0, 0};
    std::array<uint32_t, 4> out_{};
    int pos_ = 4;
};

namespace detail {
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}
} // namespace detail

// One random stream, keyed by (seed, replica, label). All variates are drawn
// by inverse transform so a stream's output depends only on its key and the
// draw sequence, never on platform RNG internals.
class RngStream {
public:
    RngStream() : RngStream(0, 0, 0) {}

    RngStream(uint64_t seed, uint64_t replica, uint64_t label) {
        uint64_t k = detail::splitmix64(seed);
        k = detail::splitmix64(k ^ replica);
        k = detail::splitmix64(k ^ detail::splitmix64(label));
        engine_ = Philox4x32(static_cast<uint32_t>(k), static_cast<uint32_t>(k >> 32));
    }

    uint32_t next_u32() { return engine_.next_u32(); }

    uint64_t next_u64() {
        const uint64_t lo = next_u32();
        const uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on the open interval (0, 1); 53-bit resolution, never 0 or 1,
    // safe under log().
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    // P(G = k) = q^k (1-q) for k >= 0; inverse transform.
    uint64_t geometric(double q) {
        if (q <= 0.0) return 0;
        const double u = uniform01();
        const double g = std::floor(std::log(u) / std::log(q));
        return g < 0.0 ? 0 : static_cast<uint64_t>(g);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, n)
    uint64_t below(uint64_t n) {
        // 64-bit multiply-shift; bias is ~n/2^64, irrelevant at our scales.
        return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

private:
    Philox4x32 engine_;
};

// Address of one replica's randomness. Operations derive internal substreams
// (coins vs clocks, one stream per particle) from the key, so coupled reruns
// and truncation tests see identical draws where the contracts require it.
struct StreamKey {
    uint64_t seed = 0;
    uint64_t replica = 0;
    uint64_t label = 0;

    // Up to 16 substreams per label.
    RngStream substream(uint64_t sub) const {
        return RngStream(seed, replica, label * 16 + sub);
    }
    // Per-entity stream inside a substream (e.g. one per particle).
    RngStream entity_stream(uint64_t sub, uint64_t entity) const {
        return RngStream(seed, replica, (label * 16 + sub) * 0x100000000ull + entity + 1);
    }
};

} // namespace befpp

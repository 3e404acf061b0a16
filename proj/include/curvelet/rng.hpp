#pragma once

// Counter-based random numbers (Philox4x32-10).  Every draw is a pure
// function of (key, counter), so independent streams for trials, runs,
// and retries come from splitting the counter space instead of holding
// shared mutable state.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace curvelet {

struct Philox4x32 {
    std::array<std::uint32_t, 4> counter{0, 0, 0, 0};
    std::array<std::uint32_t, 2> key{0, 0};

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> c,
                                              std::array<std::uint32_t, 2> k) {
        constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
        constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k[0] += W0;
                k[1] += W1;
            }
            const std::uint64_t p0 = std::uint64_t(M0) * c[0];
            const std::uint64_t p1 = std::uint64_t(M1) * c[2];
            c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
                 std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
        }
        return c;
    }

    std::array<std::uint32_t, 4> next_block() {
        auto out = block(counter, key);
        for (int i = 0; i < 4; ++i)
            if (++counter[i] != 0) break;
        return out;
    }
};

// Stream wrapper: 64-bit seed in the key, 64-bit stream id in the upper
// counter words, sequential draws in the lower words.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        eng_.key = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
        eng_.counter = {0, 0, std::uint32_t(stream), std::uint32_t(stream >> 32)};
    }

    std::uint32_t next_u32() {
        if (have_ == 0) {
            buf_ = eng_.next_block();
            have_ = 4;
        }
        return buf_[4 - have_--];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32(), hi = next_u32();
        return (hi << 32) | lo;
    }

    // 53-bit mantissa in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t bound) {
        // rejection keeps the distribution exact
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    std::vector<double> unit_vector(int n) {
        std::vector<double> v(n);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (int i = 0; i < n; ++i) {
                v[i] = gaussian();
                norm2 += v[i] * v[i];
            }
        } while (norm2 == 0.0);
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : v) x *= inv;
        return v;
    }

private:
    Philox4x32 eng_;
    std::array<std::uint32_t, 4> buf_{};
    int have_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace curvelet

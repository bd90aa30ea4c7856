#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "klconst/types.hpp"

namespace klconst {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A stream is
// identified by (seed, substream); the block counter walks forward inside it.
// Distinct substreams never overlap, so trial t of any simulation can draw
// from PhiloxStream(seed, t) and results do not depend on how trials are
// spread across workers.
class PhiloxStream {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    PhiloxStream(std::uint64_t seed, std::uint64_t substream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          substream_(substream) {}

    static Block philox(Block ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1).
    double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    // Unbiased integer in [0, n) by multiply-and-reject.
    std::uint64_t uniform_index(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Circularly symmetric CN(0, variance), Box-Muller in polar form.
    cdouble complex_normal(double variance = 1.0) {
        const double radius = std::sqrt(-variance * std::log(uniform_open()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    // Real N(0, 1).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const cdouble z = complex_normal(2.0);
        spare_ = z.imag();
        has_spare_ = true;
        return z.real();
    }

private:
    void refill() {
        const Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                        static_cast<std::uint32_t>(substream_), static_cast<std::uint32_t>(substream_ >> 32)};
        buf_ = philox(ctr, key_);
        ++block_;
        pos_ = 0;
    }

    Key key_;
    std::uint64_t substream_;
    std::uint64_t block_ = 0;
    Block buf_{};
    int pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace klconst

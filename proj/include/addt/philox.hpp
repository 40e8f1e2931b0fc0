#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., Random123). Each
// (key, counter) pair maps to four independent 32-bit words, so a stream can
// be addressed directly instead of being advanced from a shared state.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace addt {

class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// Sequential draws from one Philox stream. The key is the user seed; the
/// upper two counter words name the stream (e.g. scenario and replicate) and
/// the lower two count blocks within it.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint32_t stream_hi, std::uint32_t stream_lo)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_hi_(stream_hi),
          stream_lo_(stream_lo) {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            block_ = Philox4x32::generate({static_cast<std::uint32_t>(block_index_),
                                           static_cast<std::uint32_t>(block_index_ >> 32), stream_lo_,
                                           stream_hi_},
                                          key_);
            ++block_index_;
            pos_ = 0;
        }
        return block_[pos_++];
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        const std::uint64_t a = next_u32() >> 5;
        const std::uint64_t b = next_u32() >> 6;
        return static_cast<double>(a * 67108864u + b) * 0x1.0p-53;
    }

    /// Standard normal by the Box-Muller transform; both variates are used.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

private:
    Philox4x32::Key key_;
    std::uint32_t stream_hi_;
    std::uint32_t stream_lo_;
    std::uint64_t block_index_ = 0;
    Philox4x32::Block block_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace addt

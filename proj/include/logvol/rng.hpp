#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/random/normal_distribution.hpp>

namespace logvol {

// Philox4x64-10 counter-based block function.
struct Philox4x64 {
    using counter_type = std::array<std::uint64_t, 4>;
    using key_type = std::array<std::uint64_t, 2>;

    static counter_type block(counter_type ctr, key_type key) {
        constexpr std::uint64_t m0 = 0xD2E7470EE14C6C93ULL;
        constexpr std::uint64_t m1 = 0xCA5A826395121157ULL;
        constexpr std::uint64_t w0 = 0x9E3779B97F4A7C15ULL;
        constexpr std::uint64_t w1 = 0xBB67AE8584CAA73BULL;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += w0;
                key[1] += w1;
            }
            const unsigned __int128 p0 = static_cast<unsigned __int128>(m0) * ctr[0];
            const unsigned __int128 p1 = static_cast<unsigned __int128>(m1) * ctr[2];
            const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const auto lo0 = static_cast<std::uint64_t>(p0);
            const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
            const auto lo1 = static_cast<std::uint64_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

class Generator;

// Identifies an independent family of random sequences; sample i of a batch
// draws from substream(i), so results do not depend on how work is scheduled.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    Generator substream(std::uint64_t index) const;
    RngStream child(std::uint64_t tag) const {
        return {seed, stream_id * 0x9E3779B97F4A7C15ULL + tag + 1};
    }
};

// Sequential engine over one substream. Satisfies UniformRandomBitGenerator.
class Generator {
public:
    using result_type = std::uint64_t;

    Generator(RngStream s, std::uint64_t substream)
        : key_{s.seed, s.stream_id}, ctr_{0, substream, 0, 0} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ == filled_) refill();
        return buf_[pos_++];
    }

    // Uniform on the open interval (0,1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    // Ziggurat; stateless, so a substream's draws depend only on its counter.
    double normal() { return boost::random::normal_distribution<double>()(*this); }

private:
    // Consecutive counters, so the sequence matches one block at a time. After the
    // first block several are computed together, which keeps the multiplier busy.
    void refill() {
        const int blocks = ctr_[0] == 0 ? 1 : kBlocks;
        for (int b = 0; b < blocks; ++b) {
            const auto out = Philox4x64::block(ctr_, key_);
            for (int i = 0; i < 4; ++i) buf_[4 * b + i] = out[i];
            ++ctr_[0];
        }
        filled_ = 4 * blocks;
        pos_ = 0;
    }

    static constexpr int kBlocks = 4;

    Philox4x64::key_type key_;
    Philox4x64::counter_type ctr_;
    std::array<std::uint64_t, 4 * kBlocks> buf_{};
    int pos_ = 0;
    int filled_ = 0;
};

inline Generator RngStream::substream(std::uint64_t index) const { return Generator(*this, index); }

}  // namespace logvol

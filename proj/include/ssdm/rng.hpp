#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ssdm {

// Philox4x64-10 counter-based generator (Salmon et al.'s bijective-counter
// design). A stream is fully determined by a 128-bit key; we key substreams as
// (seed, stream_id), so replication r of a Monte Carlo study draws from the
// same values regardless of how replications are scheduled across threads.
//
// Block b of stream (seed, id) is philox4x64_10(counter = [b,0,0,0],
// key = [seed, id]). Reference vectors in the tests were generated with
// numpy.random.Philox (bit-exact; numpy emits blocks starting at counter 1).
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream_id)
        : key_{seed, stream_id} {}

    // Next raw 64-bit word of the stream.
    std::uint64_t next_u64() {
        if (pos_ == 4) {
            block_ = philox(counter_++, key_);
            pos_ = 0;
        }
        return block_[pos_++];
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; draws are produced in pairs.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        // Guard the log: map 0 to the smallest positive draw instead.
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    static std::array<std::uint64_t, 4> philox(std::uint64_t block,
                                               std::array<std::uint64_t, 2> key) {
        std::array<std::uint64_t, 4> c{block, 0, 0, 0};
        std::uint64_t k0 = key[0], k1 = key[1];
        for (int round = 0; round < 10; ++round) {
            const auto [hi0, lo0] = mulhilo(kMult0, c[0]);
            const auto [hi1, lo1] = mulhilo(kMult1, c[2]);
            c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return c;
    }

private:
    static constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    static std::pair<std::uint64_t, std::uint64_t> mulhilo(std::uint64_t a,
                                                           std::uint64_t b) {
        const unsigned __int128 p =
            static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
        return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
    }

    std::array<std::uint64_t, 2> key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 4> block_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace ssdm

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rmlab {

/// Identifies one logical random stream. Trials of a Monte Carlo run use
/// stream_id = trial index, so the sample produced by a given (seed, stream_id)
/// pair is the same no matter how trials are scheduled across workers.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// Philox-style 4x64 counter-based generator (Salmon et al., 10 rounds).
/// The output block is a pure function of (key, counter), which is what makes
/// streams splittable: key = (seed, stream_id), counter words hold the block
/// index and a substream tag.
class Philox4x64 {
  public:
    using Block = std::array<std::uint64_t, 4>;

    Philox4x64(std::uint64_t key0, std::uint64_t key1) : key_{key0, key1} {}

    Block block(std::uint64_t counter, std::uint64_t substream) const {
        Block x{counter, substream, 0, 0};
        std::array<std::uint64_t, 2> k = key_;
        for (int r = 0; r < kRounds; ++r) {
            round(x, k);
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        return x;
    }

  private:
    static constexpr int kRounds = 10;
    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    static void round(Block& x, const std::array<std::uint64_t, 2>& k) {
        const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * x[0];
        const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * x[2];
        const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
        const auto lo0 = static_cast<std::uint64_t>(p0);
        const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
        const auto lo1 = static_cast<std::uint64_t>(p1);
        x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    }

    std::array<std::uint64_t, 2> key_;
};

/// Sequential view over one (stream, substream). Draw order is fixed, so two
/// Prng instances built from the same ids produce bit-identical sequences.
class Prng {
  public:
    explicit Prng(RngStream stream, std::uint64_t substream = 0)
        : gen_(stream.seed, stream.stream_id), substream_(substream) {}

    std::uint64_t next_u64() {
        if (index_ == 4) {
            buffer_ = gen_.block(counter_++, substream_);
            index_ = 0;
        }
        return buffer_[index_++];
    }

    /// Uniform on (0, 1]; never returns 0 so log() is safe.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
    }

    /// Standard normal via Box-Muller; second value of each pair is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * kPi * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    /// +1 or -1 with equal probability.
    double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  private:
    static constexpr double kPi = 3.14159265358979323846;

    Philox4x64 gen_;
    std::uint64_t substream_;
    std::uint64_t counter_ = 0;
    Philox4x64::Block buffer_{};
    int index_ = 4;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace rmlab

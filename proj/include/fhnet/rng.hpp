#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fhnet {

/// Counter-based Philox4x32-10 generator.
///
/// A stream is fully determined by (seed, stream id); its n-th output depends
/// only on n, so work split across threads reproduces the serial sequence as
/// long as each work item owns its own stream id.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_{static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)} {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (lane_ == 2) {
            refill();
        }
        const auto lo = static_cast<std::uint64_t>(block_[2 * lane_]);
        const auto hi = static_cast<std::uint64_t>(block_[2 * lane_ + 1]);
        ++lane_;
        return (hi << 32) | lo;
    }

    /// Uniform on [0, 1) with 53 bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1], safe for log().
    double uniform_open0() noexcept { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

private:
    void refill() noexcept {
        std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(counter_),
                                         static_cast<std::uint32_t>(counter_ >> 32), stream_[0], stream_[1]};
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        block_ = ctr;
        ++counter_;
        lane_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int lane_ = 2;
};

/// Purpose tags keep streams for different consumers disjoint.
enum class StreamTag : std::uint32_t {
    topology = 1,
    outage_mc = 2,
    capacity = 3,
    redraw = 4,
    child = 5,
};

/// Mixes a tag and up to two indices into a 64-bit stream id (splitmix64 finalizer).
constexpr std::uint64_t stream_id(StreamTag tag, std::uint64_t a, std::uint64_t b = 0) noexcept {
    auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(static_cast<std::uint64_t>(tag) + 0x9E3779B97F4A7C15ull);
    h = mix(h ^ (a + 0x9E3779B97F4A7C15ull));
    h = mix(h ^ (b + 0x632BE59BD9B4E019ull));
    return h;
}

/// A (seed, stream) pair handed to routines that need randomness.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Derives the key of the i-th sub-stream (e.g. a block of Monte Carlo trials).
    StreamKey child(std::uint64_t i) const noexcept {
        return {seed, stream_id(StreamTag::child, stream, i)};
    }
    RandomStream make() const noexcept { return RandomStream(seed, stream); }
};

}  // namespace fhnet

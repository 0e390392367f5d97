#pragma once

#include <array>
#include <cstdint>

namespace repsim {

namespace detail {

// One block of Philox4x32-10: 128-bit counter, 64-bit key, 128-bit output.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::uint32_t k0, std::uint32_t k1) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t prod0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        const std::uint64_t prod1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(prod0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(prod0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(prod1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(prod1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return ctr;
}

} // namespace detail

// Counter-based uniform random stream. The key is the global seed and the
// stream id selects an independent sequence, so per-trial streams derived
// from (seed, trial index) give results that do not depend on how trials
// are scheduled across threads.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_lo_(static_cast<std::uint32_t>(seed)),
          key_hi_(static_cast<std::uint32_t>(seed >> 32)),
          stream_lo_(static_cast<std::uint32_t>(stream_id)),
          stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

    std::uint64_t next_u64() {
        if (available_ == 0) refill();
        return buffer_[--available_];
    }

    // Uniform in [0, 1); 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // True with the given probability; prob >= 1 is always true, <= 0 never.
    bool bernoulli(double prob) { return next_double() < prob; }

private:
    void refill() {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(block_),
            static_cast<std::uint32_t>(block_ >> 32),
            stream_lo_, stream_hi_};
        const auto out = detail::philox4x32_10(ctr, key_lo_, key_hi_);
        buffer_[1] = out[0] | (static_cast<std::uint64_t>(out[1]) << 32);
        buffer_[0] = out[2] | (static_cast<std::uint64_t>(out[3]) << 32);
        available_ = 2;
        ++block_;
    }

    std::uint32_t key_lo_, key_hi_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int available_ = 0;
};

} // namespace repsim

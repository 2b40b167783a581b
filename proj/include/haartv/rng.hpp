#pragma once

#include <array>
#include <cstdint>

namespace haartv {

// Counter-based random stream (Philox4x32-10). A stream is fully determined
// by (seed, stream_index); distinct stream indices give independent streams,
// so Monte Carlo workers can draw per-sample streams without coordination.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }

    std::uint32_t next_u32();

    // Uniform on (0,1) with 53 random bits, never exactly 0 or 1.
    double next_uniform();

    // Standard normal via Box-Muller; generates pairs and caches the spare.
    double next_gaussian();

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_index_;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    unsigned pos_ = 4;  // 4 == block exhausted
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace haartv

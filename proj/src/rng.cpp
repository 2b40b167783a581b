#include "haartv/rng.hpp"

#include <cmath>

namespace haartv {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, key);
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed),
      stream_index_(stream_index),
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0, 0, static_cast<std::uint32_t>(stream_index),
               static_cast<std::uint32_t>(stream_index >> 32)} {}

void RngStream::refill() {
    block_ = philox10(counter_, key_);
    // 64-bit block counter in words 0..1; words 2..3 carry the stream index.
    if (++counter_[0] == 0) ++counter_[1];
    pos_ = 0;
}

std::uint32_t RngStream::next_u32() {
    if (pos_ == 4) refill();
    return block_[pos_++];
}

double RngStream::next_uniform() {
    const std::uint32_t a = next_u32();
    const std::uint32_t b = next_u32();
    const std::uint64_t bits53 = (static_cast<std::uint64_t>(a) << 21) | (b >> 11);
    return (static_cast<double>(bits53) + 0.5) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

}  // namespace haartv

#pragma once

//! Philox4x32-10 counter-based generator. A stream is
//! fixed by (seed, stream id); draws are addressed by a 64-bit counter, so
//! replication r of a Monte Carlo run yields the same numbers whichever
//! worker executes it.

#include <array>
#include <cmath>
#include <cstdint>

namespace qlstat {

class Philox4x32
{
public:
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_{ static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32) }
    , stream_(stream)
  {}

  //! raw 128-bit block for counter position `index`
  Block block(std::uint64_t index) const noexcept
  {
    Block ctr{ static_cast<std::uint32_t>(index),
               static_cast<std::uint32_t>(index >> 32),
               static_cast<std::uint32_t>(stream_),
               static_cast<std::uint32_t>(stream_ >> 32) };
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

  //! next uniform on the open interval (0, 1), 53-bit resolution
  double uniform() noexcept
  {
    if (used_ >= 2) {
      buffer_ = block(counter_++);
      used_ = 0;
    }
    const std::uint64_t hi = buffer_[2 * used_];
    const std::uint64_t lo = buffer_[2 * used_ + 1];
    ++used_;
    const std::uint64_t bits = ((hi << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  //! standard normal by Box-Muller; pairs are cached
  double normal() noexcept
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * 3.14159265358979323846 * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Block single_round(const Block& ctr,
                            const std::array<std::uint32_t, 2>& key) noexcept
  {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    return { static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0) };
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Block buffer_{};
  int used_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace qlstat

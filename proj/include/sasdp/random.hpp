#pragma once

// Counter-based pseudo-random stream (Philox 2x64-10, Salmon et al. 2011).
// Pure 64-bit integer arithmetic: identical (seed, substream) pairs replay
// bitwise-identical sequences on any platform, and distinct substreams index
// disjoint counter blocks of the same keyed permutation.

#include <array>
#include <cstdint>

namespace sasdp {

namespace detail {

inline constexpr std::uint64_t kPhiloxMul = 0xD2B74407B1CE6E93ULL;
inline constexpr std::uint64_t kPhiloxWeyl = 0x9E3779B97F4A7C15ULL;

inline std::array<std::uint64_t, 2> philox2x64_block(std::uint64_t key,
                                                     std::uint64_t counter_hi,
                                                     std::uint64_t counter_lo) {
  std::uint64_t x0 = counter_hi;
  std::uint64_t x1 = counter_lo;
  std::uint64_t k = key;
  for (int round = 0; round < 10; ++round) {
    const unsigned __int128 product =
        static_cast<unsigned __int128>(kPhiloxMul) * x0;
    const auto hi = static_cast<std::uint64_t>(product >> 64);
    const auto lo = static_cast<std::uint64_t>(product);
    x0 = hi ^ k ^ x1;
    x1 = lo;
    k += kPhiloxWeyl;
  }
  return {x0, x1};
}

}  // namespace detail

/// Seedable deterministic stream of 64-bit words and unit uniforms.
/// Single-owner mutable state: clone or re-seed for parallel work, one
/// substream per task, and never share one instance across threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t substream_id = 0)
      : seed_(seed), substream_(substream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t substream() const { return substream_; }

  /// Number of 64-bit words handed out so far.
  std::uint64_t words_consumed() const { return words_consumed_; }

  std::uint64_t next_u64() {
    if (buf_pos_ == 2) {
      buf_ = detail::philox2x64_block(seed_, substream_, block_counter_++);
      buf_pos_ = 0;
    }
    ++words_consumed_;
    return buf_[buf_pos_++];
  }

  /// Uniform on the open interval (0, 1); never returns 0 or 1, so logs and
  /// tangents of transformed values stay finite.
  double next_uniform_open01() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t substream_;
  std::uint64_t block_counter_ = 0;
  std::uint64_t words_consumed_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int buf_pos_ = 2;
};

}  // namespace sasdp

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rapsa {

// Deterministic pseudo-random stream built on the splitmix64 mixer.
//
// All randomness in the library flows through this generator so that a single
// 64-bit seed reproduces every run bit-for-bit across platforms and thread
// counts. std::mt19937 plus the standard distributions would not give that
// guarantee (distribution algorithms are implementation-defined), so the few
// distributions we need are implemented explicitly here. Stream layout is
// versioned: changing derive() or any sampling routine is a breaking change
// to recorded traces.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, n). Multiply-shift with rejection.
  std::uint64_t next_below(std::uint64_t n) {
    unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0ULL - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Standard normal via Box-Muller. The cosine/sine pair is consumed as two
  // consecutive draws so a stream advances identically everywhere.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double next_normal(double mean, double stddev) {
    return mean + stddev * next_normal();
  }

  // Derives an independent child stream. Tags partition the seed space so
  // that, e.g., block selection and per-processor minibatch draws never share
  // a stream. (Stream layout v1.)
  SplitMix64 derive(std::uint64_t tag) const {
    SplitMix64 child(state_ ^ (0xD1B54A32D192ED03ULL * (tag + 1)));
    child.next_u64();  // decorrelate adjacent tags
    return child;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Well-known stream tags (v1). Engines derive one child per purpose; async
// engines additionally offset per-processor tags by the processor id.
namespace stream_tag {
inline constexpr std::uint64_t block_selection = 0x100;
inline constexpr std::uint64_t minibatch = 0x200;   // + processor slot
inline constexpr std::uint64_t delay_clock = 0x300; // + processor id
inline constexpr std::uint64_t tie_break = 0x400;
inline constexpr std::uint64_t conflict = 0x500;
inline constexpr std::uint64_t data_matrix = 0x600;
inline constexpr std::uint64_t data_truth = 0x601;
inline constexpr std::uint64_t data_noise = 0x602;
inline constexpr std::uint64_t data_labels = 0x603;
inline constexpr std::uint64_t probe = 0x700;
}  // namespace stream_tag

}  // namespace rapsa

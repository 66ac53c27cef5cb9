#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace vklab {

// Philox 4x32-10 counter-based generator (Salmon et al., SC 2011).  Each draw
// is a pure function of (key, counter), so streams keyed by
// (seed, path, step) are reproducible under any parallel schedule.
namespace philox {

inline constexpr std::uint32_t kW32A = 0x9E3779B9u;
inline constexpr std::uint32_t kW32B = 0xBB67AE85u;
inline constexpr std::uint32_t kM4x32A = 0xD2511F53u;
inline constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

inline void round_once(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kM4x32A) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kM4x32B) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kW32A;
      key[1] += kW32B;
    }
    round_once(ctr, key);
  }
  return ctr;
}

}  // namespace philox

// One 128-bit block keyed by (seed; path, step, stream).
inline std::array<std::uint32_t, 4> counter_block(std::uint64_t seed, std::uint64_t path,
                                                  std::uint64_t step, std::uint32_t stream = 0) {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
      static_cast<std::uint32_t>(path),
      static_cast<std::uint32_t>(path >> 32) ^ stream};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  return philox::block(ctr, key);
}

// Uniform in (0, 1): 53 significant bits, offset half an ulp off the ends.
inline double to_unit_interval(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t u = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal draw via Box-Muller from the (seed, path, step) stream.
inline double normal_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
  const auto b = counter_block(seed, path, step);
  const double u1 = to_unit_interval(b[0], b[1]);
  const double u2 = to_unit_interval(b[2], b[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace vklab

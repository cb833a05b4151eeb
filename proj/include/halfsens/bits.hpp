#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace halfsens::bits {

/// kVarMask[i]: positions p in a 64-bit word whose index bit i is set.
inline constexpr std::array<std::uint64_t, 6> kVarMask = {
    0xaaaaaaaaaaaaaaaaULL, 0xccccccccccccccccULL, 0xf0f0f0f0f0f0f0f0ULL,
    0xff00ff00ff00ff00ULL, 0xffff0000ffff0000ULL, 0xffffffff00000000ULL};

/// Swaps the two halves of every index pair differing in bit i (i < 6).
constexpr std::uint64_t flip_var_in_word(std::uint64_t w, unsigned i) noexcept {
  const unsigned shift = 1u << i;
  const std::uint64_t hi = kVarMask[i];
  return ((w & hi) >> shift) | ((w & ~hi) << shift);
}

constexpr unsigned popcount(std::uint64_t w) noexcept { return static_cast<unsigned>(std::popcount(w)); }

/// Mask of the low `count` bits; count may be 64.
constexpr std::uint64_t low_mask(unsigned count) noexcept {
  return count >= 64 ? ~0ULL : ((1ULL << count) - 1);
}

}  // namespace halfsens::bits

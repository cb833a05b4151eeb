#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "halfsens/error.hpp"

namespace halfsens {

inline constexpr unsigned kMaxTableVars = 30;

/// A point of {-1,+1}^n packed as a mask: bit i set <=> x_i = +1.
/// Coordinates are 0-based in code; x_1 of the math is bit 0.
class HypercubePoint {
 public:
  HypercubePoint(unsigned n, std::uint64_t bits) : n_(n), bits_(bits) {
    if (n == 0 || n > kMaxTableVars) throw DimensionError("hypercube point needs 1 <= n <= 30");
    if ((bits >> n) != 0) throw DomainError("hypercube point has bits above n");
  }

  unsigned num_vars() const noexcept { return n_; }
  std::uint64_t bits() const noexcept { return bits_; }

  /// x_i in {-1,+1}.
  int coord(unsigned i) const noexcept { return ((bits_ >> i) & 1u) ? 1 : -1; }

  /// x with coordinate i flipped.
  HypercubePoint neighbor(unsigned i) const { return HypercubePoint(n_, bits_ ^ (1ULL << i)); }

  friend bool operator==(const HypercubePoint&, const HypercubePoint&) = default;

 private:
  unsigned n_;
  std::uint64_t bits_;
};

/// Explicit +-1 coordinates, used by streaming evaluation at large n.
using SignVector = std::vector<std::int8_t>;

inline SignVector to_signs(const HypercubePoint& x) {
  SignVector s(x.num_vars());
  for (unsigned i = 0; i < x.num_vars(); ++i) s[i] = static_cast<std::int8_t>(x.coord(i));
  return s;
}

inline std::uint64_t to_index(std::span<const std::int8_t> x) {
  if (x.size() > kMaxTableVars) throw DimensionError("point too long for a table index");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0) idx |= 1ULL << i;
  return idx;
}

}  // namespace halfsens

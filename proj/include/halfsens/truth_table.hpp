#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "halfsens/bits.hpp"
#include "halfsens/error.hpp"
#include "halfsens/hypercube.hpp"

namespace halfsens {

/// Bit-packed table of f:{-1,+1}^n -> {0,1}; entry `idx` is f at the point
/// whose +1 coordinates are the set bits of idx. Bits past 2^n in the last
/// word are always zero.
class TruthTable {
 public:
  TruthTable() = default;
  explicit TruthTable(unsigned n);

  static TruthTable constant(unsigned n, bool value);

  template <class Fn>
  static TruthTable from_function(unsigned n, Fn&& fn) {
    TruthTable t(n);
    for (std::uint64_t idx = 0; idx < t.size(); ++idx)
      if (fn(idx)) t.set(idx, true);
    return t;
  }

  unsigned num_vars() const noexcept { return n_; }
  std::uint64_t size() const noexcept { return 1ULL << n_; }
  std::size_t num_words() const noexcept { return words_.size(); }

  bool get(std::uint64_t idx) const noexcept { return (words_[idx >> 6] >> (idx & 63)) & 1u; }
  bool operator()(const HypercubePoint& x) const;
  void set(std::uint64_t idx, bool value) noexcept {
    const std::uint64_t bit = 1ULL << (idx & 63);
    if (value)
      words_[idx >> 6] |= bit;
    else
      words_[idx >> 6] &= ~bit;
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  /// Valid-bit mask of the (single) word when n < 6, else all ones.
  std::uint64_t word_mask() const noexcept { return n_ >= 6 ? ~0ULL : bits::low_mask(1u << n_); }

  std::uint64_t count_ones() const noexcept;
  bool is_constant() const noexcept;

  TruthTable& operator&=(const TruthTable& o);
  TruthTable& operator|=(const TruthTable& o);
  TruthTable& operator^=(const TruthTable& o);
  friend TruthTable operator&(TruthTable a, const TruthTable& b) { return a &= b; }
  friend TruthTable operator|(TruthTable a, const TruthTable& b) { return a |= b; }
  friend TruthTable operator^(TruthTable a, const TruthTable& b) { return a ^= b; }
  friend TruthTable operator~(TruthTable a);

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

 private:
  void require_same_shape(const TruthTable& o) const;

  unsigned n_ = 0;
  std::vector<std::uint64_t> words_ = std::vector<std::uint64_t>(1, 0);
};

/// Pointwise 1 - f.
TruthTable complement(const TruthTable& t);

/// g(x) = f(x^i): the table with variable i flipped.
TruthTable flip_var(const TruthTable& t, unsigned i);

/// g(x) = f(x XOR z) for an arbitrary flip mask z.
TruthTable xor_permute(const TruthTable& t, std::uint64_t z);

/// One step of Hamming dilation: g(x) = 1 iff f is 1 at x or at a neighbor.
TruthTable hamming_dilate(const TruthTable& t);

/// Number of edges {x, x^i} with f(x) != f(x^i), each counted once.
std::uint64_t boundary_edges(const TruthTable& t, unsigned i);

/// Number of ones of f among points with x_i = +1.
std::uint64_t ones_with_var_set(const TruthTable& t, unsigned i);

/// Raw dump: magic "HSTT", u32 n (little endian), then ceil(2^n/8) bytes,
/// byte j bit b holding entry 8j+b.
void write_hstt(std::ostream& out, const TruthTable& t);
TruthTable read_hstt(std::istream& in);

}  // namespace halfsens

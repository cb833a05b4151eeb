#include "halfsens/truth_table.hpp"

#include <array>
#include <cstring>
#include <istream>
#include <ostream>

namespace halfsens {

TruthTable::TruthTable(unsigned n) : n_(n) {
  if (n > kMaxTableVars) throw ResourceCapError("truth table needs n <= 30, got " + std::to_string(n));
  words_.assign(n >= 6 ? (std::size_t{1} << (n - 6)) : 1, 0);
}

TruthTable TruthTable::constant(unsigned n, bool value) {
  TruthTable t(n);
  if (value)
    for (auto& w : t.words_) w = t.word_mask();
  return t;
}

bool TruthTable::operator()(const HypercubePoint& x) const {
  if (x.num_vars() != n_) throw DimensionError("point dimension does not match table");
  return get(x.bits());
}

std::uint64_t TruthTable::count_ones() const noexcept {
  std::uint64_t total = 0;
  for (auto w : words_) total += bits::popcount(w);
  return total;
}

bool TruthTable::is_constant() const noexcept {
  const auto ones = count_ones();
  return ones == 0 || ones == size();
}

void TruthTable::require_same_shape(const TruthTable& o) const {
  if (o.n_ != n_) throw DimensionError("truth tables differ in dimension");
}

TruthTable& TruthTable::operator&=(const TruthTable& o) {
  require_same_shape(o);
  for (std::size_t j = 0; j < words_.size(); ++j) words_[j] &= o.words_[j];
  return *this;
}

TruthTable& TruthTable::operator|=(const TruthTable& o) {
  require_same_shape(o);
  for (std::size_t j = 0; j < words_.size(); ++j) words_[j] |= o.words_[j];
  return *this;
}

TruthTable& TruthTable::operator^=(const TruthTable& o) {
  require_same_shape(o);
  for (std::size_t j = 0; j < words_.size(); ++j) words_[j] ^= o.words_[j];
  return *this;
}

TruthTable operator~(TruthTable a) {
  const auto mask = a.word_mask();
  for (auto& w : a.words_) w = ~w & mask;
  return a;
}

TruthTable complement(const TruthTable& t) { return ~t; }

TruthTable flip_var(const TruthTable& t, unsigned i) {
  if (i >= t.num_vars()) throw DimensionError("flip_var: coordinate out of range");
  TruthTable out(t.num_vars());
  auto src = t.words();
  auto dst = out.words();
  if (i < 6) {
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = bits::flip_var_in_word(src[j], i);
  } else {
    const std::size_t stride = std::size_t{1} << (i - 6);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j ^ stride];
  }
  return out;
}

TruthTable xor_permute(const TruthTable& t, std::uint64_t z) {
  if ((z >> t.num_vars()) != 0) throw DomainError("xor_permute: mask has bits above n");
  TruthTable out(t.num_vars());
  auto src = t.words();
  auto dst = out.words();
  const std::size_t high = static_cast<std::size_t>(z >> 6);
  const unsigned low = static_cast<unsigned>(z & 63);
  for (std::size_t j = 0; j < src.size(); ++j) {
    std::uint64_t w = src[j ^ high];
    for (unsigned i = 0; i < 6; ++i)
      if ((low >> i) & 1u) w = bits::flip_var_in_word(w, i);
    dst[j] = w;
  }
  return out;
}

TruthTable hamming_dilate(const TruthTable& t) {
  TruthTable out = t;
  auto src = t.words();
  auto dst = out.words();
  const unsigned n = t.num_vars();
  const unsigned in_word = n < 6 ? n : 6;
  for (std::size_t j = 0; j < src.size(); ++j) {
    std::uint64_t w = src[j];
    for (unsigned i = 0; i < in_word; ++i) w |= bits::flip_var_in_word(src[j], i);
    dst[j] = w;
  }
  for (unsigned i = 6; i < n; ++i) {
    const std::size_t stride = std::size_t{1} << (i - 6);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] |= src[j ^ stride];
  }
  return out;
}

std::uint64_t boundary_edges(const TruthTable& t, unsigned i) {
  if (i >= t.num_vars()) throw DimensionError("boundary_edges: coordinate out of range");
  auto w = t.words();
  std::uint64_t count = 0;
  if (i < 6) {
    const unsigned shift = 1u << i;
    const std::uint64_t low_side = ~bits::kVarMask[i] & t.word_mask();
    for (auto word : w) count += bits::popcount((word ^ (word >> shift)) & low_side);
  } else {
    const std::size_t stride = std::size_t{1} << (i - 6);
    for (std::size_t j = 0; j < w.size(); ++j)
      if ((j & stride) == 0) count += bits::popcount(w[j] ^ w[j | stride]);
  }
  return count;
}

std::uint64_t ones_with_var_set(const TruthTable& t, unsigned i) {
  if (i >= t.num_vars()) throw DimensionError("ones_with_var_set: coordinate out of range");
  auto w = t.words();
  std::uint64_t count = 0;
  if (i < 6) {
    for (auto word : w) count += bits::popcount(word & bits::kVarMask[i]);
  } else {
    const std::size_t stride = std::size_t{1} << (i - 6);
    for (std::size_t j = 0; j < w.size(); ++j)
      if (j & stride) count += bits::popcount(w[j]);
  }
  return count;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::size_t dump_bytes(unsigned n) { return n >= 3 ? (std::size_t{1} << (n - 3)) : 1; }

}  // namespace

void write_hstt(std::ostream& out, const TruthTable& t) {
  out.write("HSTT", 4);
  put_u32(out, t.num_vars());
  const std::size_t nbytes = dump_bytes(t.num_vars());
  std::vector<char> buf(nbytes);
  auto w = t.words();
  for (std::size_t b = 0; b < nbytes; ++b)
    buf[b] = static_cast<char>((w[b >> 3] >> (8 * (b & 7))) & 0xff);
  out.write(buf.data(), static_cast<std::streamsize>(nbytes));
}

TruthTable read_hstt(std::istream& in) {
  std::array<unsigned char, 8> header{};
  if (!in.read(reinterpret_cast<char*>(header.data()), 8) || std::memcmp(header.data(), "HSTT", 4) != 0)
    throw ConfigError("not an HSTT truth-table dump");
  const std::uint32_t n = header[4] | (header[5] << 8) | (header[6] << 16) | (std::uint32_t{header[7]} << 24);
  TruthTable t(n);
  const std::size_t nbytes = dump_bytes(n);
  std::vector<unsigned char> buf(nbytes);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(nbytes)))
    throw ConfigError("truncated HSTT dump");
  auto w = t.words();
  for (std::size_t b = 0; b < nbytes; ++b) w[b >> 3] |= std::uint64_t{buf[b]} << (8 * (b & 7));
  w[0] &= t.word_mask();
  return t;
}

}  // namespace halfsens

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace halfsens {

using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational r{BigInt{std::to_string(num)}, BigInt{std::to_string(den)}};
  r.canonicalize();
  return r;
}

inline Rational from_u64(std::uint64_t v) { return Rational{BigInt{std::to_string(v)}}; }

/// 2^e as an exact rational (e may be negative).
inline Rational pow2(long e) {
  BigInt p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational{BigInt{1}, p} : Rational{p};
}

inline Rational pow(const Rational& base, unsigned e) {
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational r{num, den};
  r.canonicalize();
  return r;
}

/// "num/den", or just "num" for integers.
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational parse_rational(const std::string& text) {
  Rational r{text};
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace halfsens

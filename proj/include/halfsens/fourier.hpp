#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "halfsens/rational.hpp"
#include "halfsens/truth_table.hpp"

namespace halfsens {

inline constexpr unsigned kMaxSpectrumVars = 26;

/// Integer-scaled spectrum of a 0/1 function: coeffs[S] = 2^n fhat(S) =
/// sum_x f(x) chi_S(x), chi_S(x) = prod_{i in S} x_i, S given as a mask.
struct FourierSpectrum {
  unsigned n = 0;
  std::vector<std::int64_t> coeffs;

  std::int64_t operator[](std::uint64_t mask) const { return coeffs[mask]; }
};

/// Unnormalized Sylvester-Hadamard butterfly (a, b) -> (a + b, a - b).
/// Symmetric; applying it twice multiplies by the length.
void hadamard_inplace(std::span<std::int64_t> values);
void hadamard_inplace(std::span<double> values);

/// Exact spectrum in O(n 2^n).
FourierSpectrum wht(const TruthTable& t);

/// 2^n f(x) for every x, recovered from the spectrum.
std::vector<std::int64_t> inverse_wht(const FourierSpectrum& spectrum);

/// sum_S coeffs[S]^2; equals 2^n * coeffs[0] for 0/1 functions.
std::uint64_t parseval_sum(const FourierSpectrum& spectrum);

/// Per-degree Fourier weight sum_{|S|=d} fhat(S)^2, kept as integers
/// scaled by 4^n so every entry is exact.
class DegreeWeightProfile {
 public:
  DegreeWeightProfile(unsigned n, std::vector<std::uint64_t> scaled);

  unsigned num_vars() const noexcept { return n_; }
  Rational weight(unsigned d) const;
  std::vector<Rational> weights() const;
  /// sum_{|S|=d} coeffs[S]^2 (= 4^n * weight(d)).
  std::uint64_t scaled(unsigned d) const { return scaled_.at(d); }
  double weight_approx(unsigned d) const;

 private:
  unsigned n_;
  std::vector<std::uint64_t> scaled_;
};

DegreeWeightProfile degree_profile(const FourierSpectrum& spectrum);

/// sum_{|S| > d} fhat(S)^2, for 0 <= d <= n.
Rational tail_weight(const DegreeWeightProfile& profile, unsigned d);
double tail_weight_approx(const DegreeWeightProfile& profile, unsigned d);

/// ns_rho(f) = 2 sum_S (1 - (1 - 2 rho)^{|S|}) fhat(S)^2, exactly.
Rational ns_from_spectrum(const FourierSpectrum& spectrum, const Rational& rho);
Rational ns_from_profile(const DegreeWeightProfile& profile, const Rational& rho);
/// Floating-point fast path of the same formula (|error| well below 1e-9).
double ns_from_profile_fast(const DegreeWeightProfile& profile, double rho);

/// Smallest constant used to turn the ns formula into a tail bound: for
/// |S| > d = 1/(2 rho), 1 - (1 - 2 rho)^{|S|} >= 1 - e^{-1}, hence
///   tail_weight(f, d) <= ns_rho(f) / (2 (1 - e^{-1})).
/// kTailNsLower is a rational lower bound of 1 - e^{-1} used for exact checks.
inline const Rational kTailNsLower{"632120558/1000000000"};

/// Checks tail_weight(d) * 2 * kTailNsLower <= ns_{1/(2d)} exactly (d >= 1).
bool tail_bounded_by_ns(const DegreeWeightProfile& profile, unsigned d);

/// CSV rows "mask,degree,W" in increasing mask order, with a header.
void write_spectrum_csv(std::ostream& out, const FourierSpectrum& spectrum);

}  // namespace halfsens

#include "halfsens/fourier.hpp"

#include <bit>
#include <cmath>
#include <ostream>

#include "halfsens/error.hpp"

namespace halfsens {

namespace {

template <class T>
void butterfly(std::span<T> values) {
  const std::size_t len = values.size();
  if (len == 0 || (len & (len - 1)) != 0) throw DomainError("hadamard transform needs a power-of-two length");
  for (std::size_t half = 1; half < len; half <<= 1) {
    for (std::size_t block = 0; block < len; block += 2 * half) {
      for (std::size_t j = block; j < block + half; ++j) {
        const T a = values[j];
        const T b = values[j + half];
        values[j] = a + b;
        values[j + half] = a - b;
      }
    }
  }
}

}  // namespace

void hadamard_inplace(std::span<std::int64_t> values) { butterfly(values); }
void hadamard_inplace(std::span<double> values) { butterfly(values); }

namespace {

// The butterfly treats a set bit as -1; our points use set bit = +1, so
// chi_S picks up (-1)^{|S|}.
void apply_degree_signs(std::span<std::int64_t> values) {
  for (std::size_t s = 0; s < values.size(); ++s)
    if (std::popcount(s) & 1) values[s] = -values[s];
}

}  // namespace

FourierSpectrum wht(const TruthTable& t) {
  if (t.num_vars() > kMaxSpectrumVars)
    throw ResourceCapError("exact spectrum needs n <= 26, got " + std::to_string(t.num_vars()));
  FourierSpectrum out{t.num_vars(), std::vector<std::int64_t>(t.size())};
  for (std::uint64_t x = 0; x < t.size(); ++x) out.coeffs[x] = t.get(x) ? 1 : 0;
  hadamard_inplace(out.coeffs);
  apply_degree_signs(out.coeffs);
  return out;
}

std::vector<std::int64_t> inverse_wht(const FourierSpectrum& spectrum) {
  std::vector<std::int64_t> values = spectrum.coeffs;
  apply_degree_signs(values);
  hadamard_inplace(values);
  return values;
}

std::uint64_t parseval_sum(const FourierSpectrum& spectrum) {
  std::uint64_t total = 0;
  for (auto c : spectrum.coeffs) total += static_cast<std::uint64_t>(c * c);
  return total;
}

DegreeWeightProfile::DegreeWeightProfile(unsigned n, std::vector<std::uint64_t> scaled)
    : n_(n), scaled_(std::move(scaled)) {
  if (scaled_.size() != n_ + 1) throw DimensionError("degree profile needs n + 1 entries");
}

Rational DegreeWeightProfile::weight(unsigned d) const {
  return from_u64(scaled_.at(d)) * pow2(-2 * static_cast<long>(n_));
}

std::vector<Rational> DegreeWeightProfile::weights() const {
  std::vector<Rational> out;
  out.reserve(scaled_.size());
  for (unsigned d = 0; d <= n_; ++d) out.push_back(weight(d));
  return out;
}

double DegreeWeightProfile::weight_approx(unsigned d) const {
  return std::ldexp(static_cast<double>(scaled_.at(d)), -2 * static_cast<int>(n_));
}

DegreeWeightProfile degree_profile(const FourierSpectrum& spectrum) {
  std::vector<std::uint64_t> scaled(spectrum.n + 1, 0);
  for (std::size_t s = 0; s < spectrum.coeffs.size(); ++s) {
    const auto c = spectrum.coeffs[s];
    scaled[std::popcount(s)] += static_cast<std::uint64_t>(c * c);
  }
  return {spectrum.n, std::move(scaled)};
}

Rational tail_weight(const DegreeWeightProfile& profile, unsigned d) {
  if (d > profile.num_vars()) throw DomainError("tail_weight: degree exceeds n");
  std::uint64_t total = 0;
  for (unsigned j = d + 1; j <= profile.num_vars(); ++j) total += profile.scaled(j);
  return from_u64(total) * pow2(-2 * static_cast<long>(profile.num_vars()));
}

double tail_weight_approx(const DegreeWeightProfile& profile, unsigned d) {
  if (d > profile.num_vars()) throw DomainError("tail_weight: degree exceeds n");
  std::uint64_t total = 0;
  for (unsigned j = d + 1; j <= profile.num_vars(); ++j) total += profile.scaled(j);
  return std::ldexp(static_cast<double>(total), -2 * static_cast<int>(profile.num_vars()));
}

Rational ns_from_profile(const DegreeWeightProfile& profile, const Rational& rho) {
  if (rho <= 0 || rho >= 1) throw DomainError("noise rate must lie in (0,1)");
  const Rational decay = 1 - 2 * rho;
  Rational total = 0;
  Rational power = 1;
  for (unsigned d = 0; d <= profile.num_vars(); ++d) {
    if (profile.scaled(d) != 0) total += (1 - power) * from_u64(profile.scaled(d));
    power *= decay;
  }
  Rational out = 2 * total * pow2(-2 * static_cast<long>(profile.num_vars()));
  out.canonicalize();
  return out;
}

Rational ns_from_spectrum(const FourierSpectrum& spectrum, const Rational& rho) {
  return ns_from_profile(degree_profile(spectrum), rho);
}

double ns_from_profile_fast(const DegreeWeightProfile& profile, double rho) {
  if (!(rho > 0 && rho < 1)) throw DomainError("noise rate must lie in (0,1)");
  double total = 0;
  double power = 1;
  for (unsigned d = 0; d <= profile.num_vars(); ++d) {
    total += (1 - power) * profile.weight_approx(d);
    power *= 1 - 2 * rho;
  }
  return 2 * total;
}

bool tail_bounded_by_ns(const DegreeWeightProfile& profile, unsigned d) {
  if (d == 0) throw DomainError("tail/ns comparison needs d >= 1");
  if (d > profile.num_vars()) return true;
  const Rational rho{1, 2 * d};
  return tail_weight(profile, d) * 2 * kTailNsLower <= ns_from_profile(profile, rho);
}

void write_spectrum_csv(std::ostream& out, const FourierSpectrum& spectrum) {
  out << "mask,degree,W\n";
  for (std::size_t s = 0; s < spectrum.coeffs.size(); ++s)
    out << s << ',' << std::popcount(s) << ',' << spectrum.coeffs[s] << '\n';
}

}  // namespace halfsens

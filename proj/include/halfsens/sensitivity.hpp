#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "halfsens/composite.hpp"
#include "halfsens/rational.hpp"
#include "halfsens/truth_table.hpp"

namespace halfsens {

inline constexpr unsigned kMaxExactSensitivityVars = 26;
inline constexpr unsigned kMaxNoiseEnumVars = 20;

/// Exact average sensitivity. Boundary edges are unordered pairs
/// {x, x^i} with f(x) != f(x^i); as = B / 2^{n-1}.
struct SensitivityReport {
  unsigned n = 0;
  std::uint64_t boundary_edges = 0;
  Rational as_exact;
  Rational mean;
  /// Boundary edges per direction (twice the influence times 2^{n-2}).
  std::vector<std::uint64_t> per_direction;
};

SensitivityReport average_sensitivity_exact(const TruthTable& t);

enum class McMode { SampledDirection, FullScan };

std::string_view to_string(McMode mode) noexcept;

/// Seeded estimate; (seed, samples, spec) determine it bit for bit,
/// whatever the worker count.
struct MonteCarloEstimate {
  double estimate = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  McMode mode = McMode::SampledDirection;
};

/// Estimates E_x #{i : f(x) != f(x^i)}. SampledDirection checks one
/// uniform direction per sample and scales by n; FullScan checks all n.
MonteCarloEstimate average_sensitivity_mc(const CompositeSpec& spec, std::uint64_t samples,
                                          std::uint64_t seed, McMode mode = McMode::SampledDirection);

/// counts[d] = number of ordered pairs (x, y) at Hamming distance d with
/// f(x) != f(y).
std::vector<std::uint64_t> disagreement_by_distance(const TruthTable& t);

/// sum_{x,y} 2^{-n} rho^{d(x,y)} (1-rho)^{n-d(x,y)} [f(x) != f(y)], exactly.
Rational noise_sensitivity_exact_enum(const TruthTable& t, const Rational& rho);

/// Frequency of f(x) != f(y) where y flips each coordinate of x
/// independently with probability eps.
MonteCarloEstimate noise_sensitivity_mc(const CompositeSpec& spec, double eps, std::uint64_t samples,
                                        std::uint64_t seed);

/// E_x[S(x) * sum_i sigma_i x_i], exactly.
Rational correlation_statistic(const TruthTable& s, std::span<const int> sigma);

struct ClaimViolation {
  std::uint64_t x = 0;
  unsigned i = 0;
  int lhs = 0;
  int rhs = 0;
};

/// Exhaustive check, at every (x, i), of
///   |F_m(x)-F_m(x^i)| - |F_{m-1}(x)-F_{m-1}(x^i)|
///     <= x_i ((F_m(x)-F_m(x^i)) - (F_{m-1}(x)-F_{m-1}(x^i)))
/// with F_m = F_prev OR f_m. Holds whenever f_m is increasing in every
/// coordinate; a unate f_m with decreasing coordinates may violate it and
/// the violations are returned. Throws DomainError for non-unate f_m.
std::vector<ClaimViolation> claim_pointwise_check(const TruthTable& prev, const TruthTable& term);

struct LedgerRow {
  unsigned m = 0;
  Rational p;         ///< E[S_m], S_m = F_m - F_{m-1}
  Rational delta_as;  ///< as(F_m) - as(F_{m-1})
  Rational corr;      ///< 2 E[S_m sum_i sigma_i x_i]
  double bound = 0;   ///< c p sqrt(n ln(1/p)), 0 when p = 0
};

struct TelescopingLedger {
  unsigned n = 0;
  std::vector<LedgerRow> rows;
  Rational total_mass;  ///< E[F] = sum_m p_m
  Rational as_total;    ///< as(F) = sum_m delta_as
  Rational corr_total;  ///< sum_m corr

  /// delta_as <= corr on every row.
  bool holds() const;
};

/// Builds F_m = f_1 OR ... OR f_m term by term; sigma for row m is the
/// orientation of f_m. Throws DomainError if a term is not unate.
TelescopingLedger telescoping_audit(std::span<const TruthTable> terms, double c = 1.0);

/// "function_id,n,k,B,as_num,as_den,mean_num,mean_den"
void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, std::string_view function_id, std::size_t k,
                          const SensitivityReport& report);
/// "m,p_m,delta_as,corr,bound"
void write_ledger_csv(std::ostream& out, const TelescopingLedger& ledger);

}  // namespace halfsens

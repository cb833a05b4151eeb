#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "halfsens/composite.hpp"
#include "halfsens/random.hpp"
#include "halfsens/rational.hpp"

namespace halfsens {

// ---------------------------------------------------------------------------
// Threshold halfspaces

inline constexpr unsigned kMaxExactTailVars = 64;

/// Pr(sum_{i<=n} x_i > t) for t in [-n, n]; sum x_i = n - 2j with j minus signs.
struct BinomialTailTable {
  unsigned n = 0;
  std::vector<Rational> tail;  ///< tail[t + n]

  /// 1 below -n, 0 from n upward.
  Rational at(std::int64_t t) const;
};

BinomialTailTable binomial_tail(unsigned n);

/// Floating tail for any n (log-space binomial sums).
long double binomial_tail_approx(unsigned n, std::int64_t t);

struct ThresholdChoice {
  LinearThresholdFunction ltf;
  double mean = 0;             ///< achieved Pr(sum x_i > theta)
  std::optional<Rational> exact_mean;  ///< set when n <= 64
};

/// Unit-weight halfspace with theta the largest integer t such that
/// Pr(sum x_i > t) >= eps. Requires 2^{-n} <= eps < 1/2.
ThresholdChoice threshold_ltf(unsigned n, const Rational& eps);

/// Same rule without the range check (eps in (0, 1]); used where finite
/// instances fall outside the open range and the caller records a clamp.
ThresholdChoice threshold_ltf_unchecked(unsigned n, double eps);

/// as of [sum x_i > theta] = n Pr(sum of n-1 coordinates in {theta, theta+1}).
Rational threshold_sensitivity(unsigned n, std::int64_t theta);

// ---------------------------------------------------------------------------
// Lower-bound family: OR of m random sign flips of one threshold halfspace

struct LowerBoundFamily {
  unsigned n = 0;
  std::uint64_t k = 0;
  std::uint64_t seed = 0;
  double eps_requested = 0;  ///< 1/k
  bool clamped = false;      ///< eps outside [2^{-n}, 1/2)
  LinearThresholdFunction base = LinearThresholdFunction::constant(1, false);
  double base_mean = 0;
  std::uint64_t m = 0;  ///< number of terms
  std::vector<std::vector<int>> signs;

  LinearThresholdFunction term(std::size_t i) const;
  CompositeSpec union_spec() const;
  /// Intersection form (De Morgan complement of the union); same as.
  CompositeSpec intersection_spec() const;
  nlohmann::json metadata() const;
};

/// eps = 1/k; a single base term when E[base] > 1/4, otherwise
/// m = min(floor(1/(4 E[base])), k) terms with independent uniform signs.
LowerBoundFamily lower_bound_family(unsigned n, std::uint64_t k, std::uint64_t seed);

/// Table of the union. Unit-weight bases use the fact that each term is a
/// Hamming ball around its sign vector, so the union is a multi-source
/// dilation costing O(r n 2^n / 64) independent of m.
TruthTable union_table(const LowerBoundFamily& family);

struct UnionTrial {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t m = 0;
  Rational as;
  double ratio = 0;  ///< as / sqrt(n ln k)
};

struct UnionAuditReport {
  unsigned n = 0;
  std::uint64_t k = 0;
  std::vector<UnionTrial> trials;
  double mean_as = 0;
  double mean_ratio = 0;  ///< mean_as / sqrt(n ln k); NaN for k < 2
  std::uint64_t audited_edges = 0;
  std::uint64_t covered_edges = 0;
  double cover_probability = 0;  ///< covered / audited boundary edges
  std::size_t best_trial = 0;    ///< index of the largest as
};

/// Samples `trials` sign families (trial t uses derive_seed(seed, t)),
/// computes exact as(F) for each, and audits the union-bound step: for
/// boundary edges x -> y of the first `audit_terms` terms, how often some
/// other term is 1 at x or y.
UnionAuditReport expected_union_sensitivity_audit(unsigned n, std::uint64_t k, std::uint64_t trials,
                                                  std::uint64_t seed, std::size_t audit_terms = 4);

// ---------------------------------------------------------------------------
// Random intersections

enum class WeightDist { Unit, RandomSign, GaussianLike };

WeightDist parse_weight_dist(std::string_view name);
std::string_view to_string(WeightDist d) noexcept;

struct IntersectionOptions {
  WeightDist dist = WeightDist::RandomSign;
  /// Each halfspace cuts off mass drawn uniformly from [lo/k, hi/k].
  double cut_lo = 0.25;
  double cut_hi = 1.0;
};

/// AND of k random halfspaces; deterministic in (n, k, options, seed).
CompositeSpec random_intersection(unsigned n, std::size_t k, std::uint64_t seed,
                                  const IntersectionOptions& options = {});

/// OR of k random unate functions: each term is a random-orientation
/// subcube indicator (a conjunction of literals) with mass near 1/k.
std::vector<TruthTable> random_unate_terms(unsigned n, std::size_t k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Binning process for noise sensitivity

/// One run of: random bins, uniform z, per-bin signs b, x = z * b[bin],
/// y = x with one uniform bin flipped (b' = b with that sign flipped).
struct BinnedNoiseDraw {
  std::uint32_t m = 0;
  std::vector<std::uint32_t> bins;
  SignVector z, b, b_prime, x, y;
  std::uint32_t chosen_bin = 0;
};

BinnedNoiseDraw binned_pair(unsigned n, unsigned m, std::uint64_t seed);
BinnedNoiseDraw binned_pair_with_bins(std::span<const std::uint32_t> bins, unsigned m, CounterRng& rng);

/// Exact total-variation distance between the binning process and direct
/// eps = 1/m noise, by enumerating all of the process randomness. n <= 6.
Rational binning_distribution_check(unsigned n, unsigned m);

/// Halfspaces of g(b) = f(x), x_i = z_i b_{bin(i)}: induced weights
/// w'_j = sum_{i in bin j} w_i z_i. Table terms are restricted pointwise.
CompositeSpec restrict_spec(const CompositeSpec& spec, std::span<const std::uint32_t> bins,
                            std::span<const std::int8_t> z, unsigned m);
TruthTable restricted_function(const CompositeSpec& spec, std::span<const std::uint32_t> bins,
                               std::span<const std::int8_t> z, unsigned m);

/// E_{bins, z}[as(g)] / m by full enumeration (n <= 6).
Rational restricted_sensitivity_mean(const CompositeSpec& spec, unsigned m);

/// Noise rate rounded down to 1/ceil(1/eps); returns the bin count m.
unsigned noise_bins(double eps);

}  // namespace halfsens

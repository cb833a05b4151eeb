#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "halfsens/hypercube.hpp"
#include "halfsens/truth_table.hpp"

namespace halfsens {

inline constexpr std::int64_t kMaxWeight = 1 << 20;

/// Indicator of sum_i w_i x_i > threshold (strict), integer weights.
class LinearThresholdFunction {
 public:
  LinearThresholdFunction(std::vector<std::int64_t> weights, std::int64_t threshold);

  /// Indicator of sum_i x_i > threshold.
  static LinearThresholdFunction unit(unsigned n, std::int64_t threshold);
  /// Indicator of sign * x_i > 0 on n variables.
  static LinearThresholdFunction dictator(unsigned n, unsigned i, int sign = 1);
  static LinearThresholdFunction constant(unsigned n, bool value);

  unsigned num_vars() const noexcept { return static_cast<unsigned>(weights_.size()); }
  std::span<const std::int64_t> weights() const noexcept { return weights_; }
  std::int64_t threshold() const noexcept { return threshold_; }

  std::int64_t linear_form(std::span<const std::int8_t> x) const;
  std::int64_t linear_form(std::uint64_t bits) const;

  bool operator()(const HypercubePoint& x) const;
  bool operator()(std::span<const std::int8_t> x) const;

  friend bool operator==(const LinearThresholdFunction&, const LinearThresholdFunction&) = default;

 private:
  std::vector<std::int64_t> weights_;
  std::int64_t threshold_;
};

/// w'_i = s_i w_i, same threshold: f_s(x) = f(s_1 x_1, ..., s_n x_n).
LinearThresholdFunction flip_signs(const LinearThresholdFunction& f, std::span<const int> signs);

/// 1 - f as a halfspace: sum (-w_i) x_i > -threshold - 1.
LinearThresholdFunction complement(const LinearThresholdFunction& f);

/// Exhaustive table; O(2^n log 64) via a sorted low-block lookup.
TruthTable truth_table(const LinearThresholdFunction& f);

/// Distribution of sum_i w_i x_i under uniform x: (value, probability)
/// pairs in increasing value order. Used to place thresholds.
std::vector<std::pair<std::int64_t, long double>> linear_form_distribution(
    std::span<const std::int64_t> weights);

}  // namespace halfsens

#include "halfsens/ltf.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace halfsens {

LinearThresholdFunction::LinearThresholdFunction(std::vector<std::int64_t> weights, std::int64_t threshold)
    : weights_(std::move(weights)), threshold_(threshold) {
  if (weights_.empty()) throw DimensionError("halfspace needs at least one variable");
  for (auto w : weights_)
    if (w > kMaxWeight || w < -kMaxWeight) throw DomainError("halfspace weight exceeds 2^20 in magnitude");
}

LinearThresholdFunction LinearThresholdFunction::unit(unsigned n, std::int64_t threshold) {
  return {std::vector<std::int64_t>(n, 1), threshold};
}

LinearThresholdFunction LinearThresholdFunction::dictator(unsigned n, unsigned i, int sign) {
  std::vector<std::int64_t> w(n, 0);
  w.at(i) = sign < 0 ? -1 : 1;
  return {std::move(w), 0};
}

LinearThresholdFunction LinearThresholdFunction::constant(unsigned n, bool value) {
  return {std::vector<std::int64_t>(n, 0), value ? -1 : 0};
}

std::int64_t LinearThresholdFunction::linear_form(std::span<const std::int8_t> x) const {
  if (x.size() != weights_.size()) throw DimensionError("point dimension does not match halfspace");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += weights_[i] * x[i];
  return s;
}

std::int64_t LinearThresholdFunction::linear_form(std::uint64_t bits) const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < weights_.size(); ++i) s += ((bits >> i) & 1u) ? weights_[i] : -weights_[i];
  return s;
}

bool LinearThresholdFunction::operator()(const HypercubePoint& x) const {
  if (x.num_vars() != num_vars()) throw DimensionError("point dimension does not match halfspace");
  return linear_form(x.bits()) > threshold_;
}

bool LinearThresholdFunction::operator()(std::span<const std::int8_t> x) const {
  return linear_form(x) > threshold_;
}

LinearThresholdFunction flip_signs(const LinearThresholdFunction& f, std::span<const int> signs) {
  if (signs.size() != f.num_vars()) throw DimensionError("sign vector length does not match halfspace");
  std::vector<std::int64_t> w(f.weights().begin(), f.weights().end());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw DomainError("sign vector entries must be +-1");
    w[i] *= signs[i];
  }
  return {std::move(w), f.threshold()};
}

LinearThresholdFunction complement(const LinearThresholdFunction& f) {
  std::vector<std::int64_t> w(f.weights().begin(), f.weights().end());
  for (auto& v : w) v = -v;
  return {std::move(w), -f.threshold() - 1};
}

TruthTable truth_table(const LinearThresholdFunction& f) {
  const unsigned n = f.num_vars();
  TruthTable out(n);
  auto w = f.weights();
  const unsigned low_vars = std::min(n, 6u);
  const std::size_t low_count = std::size_t{1} << low_vars;

  // Low block: the 2^low_vars partial sums, sorted, with suffix masks so a
  // whole word is one binary search: word = OR of bits whose sum > t.
  std::vector<std::pair<std::int64_t, unsigned>> low(low_count);
  for (std::size_t l = 0; l < low_count; ++l) {
    std::int64_t s = 0;
    for (unsigned i = 0; i < low_vars; ++i) s += ((l >> i) & 1u) ? w[i] : -w[i];
    low[l] = {s, static_cast<unsigned>(l)};
  }
  std::sort(low.begin(), low.end());
  std::vector<std::int64_t> sorted(low_count);
  std::vector<std::uint64_t> suffix(low_count + 1, 0);
  for (std::size_t j = low_count; j-- > 0;) {
    sorted[j] = low[j].first;
    suffix[j] = suffix[j + 1] | (1ULL << low[j].second);
  }

  // High block sums by doubling: high[h | 2^j] = high[h] + 2 w_{6+j}.
  const unsigned high_vars = n - low_vars;
  std::vector<std::int64_t> high(std::size_t{1} << high_vars);
  high[0] = 0;
  for (unsigned i = low_vars; i < n; ++i) high[0] -= w[i];
  for (unsigned j = 0; j < high_vars; ++j) {
    const std::size_t half = std::size_t{1} << j;
    for (std::size_t h = 0; h < half; ++h) high[h | half] = high[h] + 2 * w[low_vars + j];
  }

  auto words = out.words();
  for (std::size_t h = 0; h < high.size(); ++h) {
    const std::int64_t t = f.threshold() - high[h];
    const auto pos = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    words[h] = suffix[static_cast<std::size_t>(pos)];
  }
  return out;
}

std::vector<std::pair<std::int64_t, long double>> linear_form_distribution(
    std::span<const std::int64_t> weights) {
  std::int64_t span = 0;
  for (auto w : weights) span += w < 0 ? -w : w;
  // dense[v + span] = Pr(sum = v)
  std::vector<long double> dense(static_cast<std::size_t>(2 * span + 1), 0.0L);
  std::vector<long double> next(dense.size());
  dense[static_cast<std::size_t>(span)] = 1.0L;
  std::int64_t reach = 0;
  for (auto w : weights) {
    const std::int64_t a = w < 0 ? -w : w;
    std::fill(next.begin(), next.end(), 0.0L);
    for (std::int64_t v = -reach; v <= reach; ++v) {
      const long double p = dense[static_cast<std::size_t>(v + span)];
      if (p == 0.0L) continue;
      next[static_cast<std::size_t>(v + a + span)] += p / 2;
      next[static_cast<std::size_t>(v - a + span)] += p / 2;
    }
    dense.swap(next);
    reach += a;
  }
  std::vector<std::pair<std::int64_t, long double>> out;
  for (std::int64_t v = -span; v <= span; ++v)
    if (dense[static_cast<std::size_t>(v + span)] > 0.0L) out.emplace_back(v, dense[static_cast<std::size_t>(v + span)]);
  return out;
}

}  // namespace halfsens

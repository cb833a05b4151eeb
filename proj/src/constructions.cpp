#include "halfsens/constructions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "halfsens/error.hpp"
#include "halfsens/sensitivity.hpp"

namespace halfsens {

namespace {

BigInt binomial(unsigned n, unsigned j) {
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n, j);
  return out;
}

TruthTable literal_table(unsigned n, unsigned i, bool positive) {
  TruthTable t(n);
  auto w = t.words();
  for (std::size_t j = 0; j < w.size(); ++j) {
    std::uint64_t word;
    if (i < 6)
      word = bits::kVarMask[i];
    else
      word = ((j >> (i - 6)) & 1u) ? ~0ULL : 0ULL;
    w[j] = (positive ? word : ~word) & t.word_mask();
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------

Rational BinomialTailTable::at(std::int64_t t) const {
  const auto sn = static_cast<std::int64_t>(n);
  if (t < -sn) return 1;
  if (t >= sn) return 0;
  return tail[static_cast<std::size_t>(t + sn)];
}

BinomialTailTable binomial_tail(unsigned n) {
  if (n == 0 || n > kMaxExactTailVars) throw ResourceCapError("exact binomial tails need 1 <= n <= 64");
  BinomialTailTable table;
  table.n = n;
  const auto sn = static_cast<std::int64_t>(n);
  table.tail.resize(2 * n + 1);
  // count of points with sum > t, accumulated from the top (j = 0 minus signs).
  const Rational scale = pow2(-static_cast<long>(n));
  for (std::int64_t t = -sn; t <= sn; ++t) {
    BigInt count = 0;
    for (unsigned j = 0; j <= n; ++j)
      if (sn - 2 * static_cast<std::int64_t>(j) > t) count += binomial(n, j);
    Rational r = Rational(count) * scale;
    r.canonicalize();
    table.tail[static_cast<std::size_t>(t + sn)] = r;
  }
  return table;
}

long double binomial_tail_approx(unsigned n, std::int64_t t) {
  const auto sn = static_cast<std::int64_t>(n);
  if (t < -sn) return 1.0L;
  if (t >= sn) return 0.0L;
  const long double log_norm = n * std::log(2.0L);
  long double total = 0;
  for (unsigned j = 0; j <= n; ++j) {
    if (sn - 2 * static_cast<std::int64_t>(j) <= t) break;
    total += std::exp(std::lgamma(n + 1.0L) - std::lgamma(j + 1.0L) - std::lgamma(n - j + 1.0L) - log_norm);
  }
  return std::min(total, 1.0L);
}

namespace {

ThresholdChoice choose_threshold_exact(unsigned n, const Rational& eps) {
  const auto table = binomial_tail(n);
  const auto sn = static_cast<std::int64_t>(n);
  for (std::int64_t t = sn; t >= -sn - 1; --t) {
    const Rational tail = table.at(t);
    if (tail >= eps) return {LinearThresholdFunction::unit(n, t), tail.get_d(), tail};
  }
  throw DomainError("threshold choice: eps exceeds 1");
}

ThresholdChoice choose_threshold_approx(unsigned n, double eps) {
  const auto sn = static_cast<std::int64_t>(n);
  for (std::int64_t t = sn; t >= -sn - 1; --t) {
    const long double tail = binomial_tail_approx(n, t);
    if (tail >= eps) return {LinearThresholdFunction::unit(n, t), static_cast<double>(tail), std::nullopt};
  }
  throw DomainError("threshold choice: eps exceeds 1");
}

}  // namespace

ThresholdChoice threshold_ltf(unsigned n, const Rational& eps) {
  if (n == 0) throw DimensionError("threshold_ltf needs n >= 1");
  const Rational lower = n > 200 ? Rational{0} : pow2(-static_cast<long>(n));
  if (!(eps >= lower && eps > 0 && eps < Rational{1, 2}))
    throw DomainError("threshold_ltf needs 2^-n <= eps < 1/2, got " + eps.get_str());
  if (n <= kMaxExactTailVars) return choose_threshold_exact(n, eps);
  return choose_threshold_approx(n, eps.get_d());
}

ThresholdChoice threshold_ltf_unchecked(unsigned n, double eps) {
  if (n == 0) throw DimensionError("threshold_ltf needs n >= 1");
  if (!(eps > 0 && eps <= 1)) throw DomainError("threshold choice needs eps in (0, 1]");
  if (n <= kMaxExactTailVars) return choose_threshold_exact(n, Rational{eps});
  return choose_threshold_approx(n, eps);
}

Rational threshold_sensitivity(unsigned n, std::int64_t theta) {
  if (n == 0 || n > kMaxExactTailVars + 1) throw ResourceCapError("closed-form sensitivity needs n <= 65");
  const auto rest = static_cast<std::int64_t>(n) - 1;
  BigInt count = 0;
  for (std::int64_t j = 0; j <= rest; ++j) {
    const std::int64_t s = rest - 2 * j;
    if (s == theta || s == theta + 1) count += binomial(static_cast<unsigned>(rest), static_cast<unsigned>(j));
  }
  Rational r = Rational(count * n) * pow2(-rest);
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------------------

LinearThresholdFunction LowerBoundFamily::term(std::size_t i) const { return flip_signs(base, signs.at(i)); }

CompositeSpec LowerBoundFamily::union_spec() const {
  CompositeSpec spec(n, Combiner::Or);
  for (std::size_t i = 0; i < signs.size(); ++i) spec.add_term(term(i));
  return spec;
}

CompositeSpec LowerBoundFamily::intersection_spec() const { return complement(union_spec()); }

nlohmann::json LowerBoundFamily::metadata() const {
  return {{"seed", seed},     {"k", k},           {"m", m},
          {"eps_requested", eps_requested},       {"eps_clamped", clamped},
          {"base_threshold", base.threshold()},   {"base_mean", base_mean}};
}

LowerBoundFamily lower_bound_family(unsigned n, std::uint64_t k, std::uint64_t seed) {
  if (n == 0) throw DimensionError("lower_bound_family needs n >= 1");
  if (k == 0) throw DomainError("lower_bound_family needs k >= 1");
  if (n < 64 && k > (1ULL << n)) throw DomainError("lower_bound_family needs k <= 2^n");
  LowerBoundFamily fam;
  fam.n = n;
  fam.k = k;
  fam.seed = seed;
  fam.eps_requested = 1.0 / static_cast<double>(k);
  const Rational eps{1, static_cast<unsigned long>(k)};
  fam.clamped = !(eps < Rational{1, 2} && (n >= 64 || eps >= pow2(-static_cast<long>(n))));

  const ThresholdChoice choice = threshold_ltf_unchecked(n, fam.eps_requested);
  fam.base = choice.ltf;
  fam.base_mean = choice.mean;

  bool single;
  if (choice.exact_mean) {
    single = *choice.exact_mean > Rational{1, 4};
    if (!single) {
      const Rational inv = 1 / (4 * *choice.exact_mean);
      const BigInt fl = inv.get_num() / inv.get_den();
      fam.m = std::min<std::uint64_t>(fl.get_ui(), k);
    }
  } else {
    single = choice.mean > 0.25;
    if (!single) fam.m = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(1.0 / (4 * choice.mean))), k);
  }
  if (single) {
    fam.m = 1;
    fam.signs.assign(1, std::vector<int>(n, 1));
    return fam;
  }
  fam.m = std::max<std::uint64_t>(fam.m, 1);
  CounterRng rng(seed);
  fam.signs.resize(fam.m);
  for (auto& s : fam.signs) {
    s.resize(n);
    std::uint64_t word = 0;
    for (unsigned i = 0; i < n; ++i) {
      if ((i & 63) == 0) word = rng();
      s[i] = ((word >> (i & 63)) & 1u) ? 1 : -1;
    }
  }
  return fam;
}

namespace {

bool has_unit_weights(const LinearThresholdFunction& f) {
  return std::all_of(f.weights().begin(), f.weights().end(), [](auto w) { return w == 1; });
}

std::uint64_t sign_mask(const std::vector<int>& s) {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] > 0) mask |= 1ULL << i;
  return mask;
}

// Union of Hamming balls of radius r (r < 0: empty) around the centers.
TruthTable ball_union(unsigned n, std::span<const std::uint64_t> centers, std::int64_t r) {
  TruthTable t(n);
  if (r < 0) return t;
  if (r >= static_cast<std::int64_t>(n)) return centers.empty() ? t : TruthTable::constant(n, true);
  for (auto c : centers) t.set(c, true);
  for (std::int64_t step = 0; step < r; ++step) t = hamming_dilate(t);
  return t;
}

std::int64_t ball_radius(const LowerBoundFamily& fam) {
  const std::int64_t slack = static_cast<std::int64_t>(fam.n) - fam.base.threshold() - 1;
  return slack < 0 ? -1 : slack / 2;
}

std::vector<std::uint64_t> centers_of(const LowerBoundFamily& fam) {
  std::vector<std::uint64_t> c;
  c.reserve(fam.signs.size());
  for (const auto& s : fam.signs) c.push_back(sign_mask(s));
  return c;
}

}  // namespace

TruthTable union_table(const LowerBoundFamily& fam) {
  if (fam.n > kMaxTableVars) throw ResourceCapError("union table needs n <= 30");
  if (has_unit_weights(fam.base)) return ball_union(fam.n, centers_of(fam), ball_radius(fam));
  return truth_table(fam.union_spec());
}

UnionAuditReport expected_union_sensitivity_audit(unsigned n, std::uint64_t k, std::uint64_t trials,
                                                  std::uint64_t seed, std::size_t audit_terms) {
  if (n > 22) throw ResourceCapError("union audit needs n <= 22, got " + std::to_string(n));
  if (trials == 0) throw DomainError("union audit needs at least one trial");
  UnionAuditReport report;
  report.n = n;
  report.k = k;
  const double scale = k >= 2 ? std::sqrt(n * std::log(static_cast<double>(k))) : 0.0;
  double sum_as = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    const LowerBoundFamily fam = lower_bound_family(n, k, trial_seed);
    const TruthTable F = union_table(fam);
    UnionTrial row{t, trial_seed, fam.m, average_sensitivity_exact(F).as_exact, 0};
    row.ratio = scale > 0 ? row.as.get_d() / scale : std::numeric_limits<double>::quiet_NaN();
    sum_as += row.as.get_d();

    const std::size_t audited = std::min<std::size_t>(audit_terms, fam.signs.size());
    const bool unit = has_unit_weights(fam.base);
    const auto centers = centers_of(fam);
    for (std::size_t i = 0; i < audited && fam.signs.size() > 1; ++i) {
      TruthTable own(n), others(n);
      if (unit) {
        const std::uint64_t mine = centers[i];
        std::vector<std::uint64_t> rest;
        for (std::size_t j = 0; j < centers.size(); ++j)
          if (j != i) rest.push_back(centers[j]);
        own = ball_union(n, {&mine, 1}, ball_radius(fam));
        others = ball_union(n, rest, ball_radius(fam));
      } else {
        own = truth_table(fam.term(i));
        for (std::size_t j = 0; j < fam.signs.size(); ++j)
          if (j != i) others |= truth_table(fam.term(j));
      }
      for (unsigned d = 0; d < n; ++d) {
        const TruthTable own_n = flip_var(own, d);
        const TruthTable others_n = flip_var(others, d);
        // each boundary edge once: the endpoint where the term is 1
        const TruthTable edge_from = own & ~own_n;
        report.audited_edges += edge_from.count_ones();
        report.covered_edges += (edge_from & (others | others_n)).count_ones();
      }
    }
    report.trials.push_back(std::move(row));
  }
  report.mean_as = sum_as / static_cast<double>(trials);
  report.mean_ratio = scale > 0 ? report.mean_as / scale : std::numeric_limits<double>::quiet_NaN();
  report.cover_probability = report.audited_edges == 0
                                 ? 0.0
                                 : static_cast<double>(report.covered_edges) / static_cast<double>(report.audited_edges);
  for (std::size_t t = 1; t < report.trials.size(); ++t)
    if (report.trials[t].as > report.trials[report.best_trial].as) report.best_trial = t;
  return report;
}

// ---------------------------------------------------------------------------

WeightDist parse_weight_dist(std::string_view name) {
  if (name == "unit") return WeightDist::Unit;
  if (name == "sign" || name == "random-sign" || name == "pm1") return WeightDist::RandomSign;
  if (name == "gaussian" || name == "gaussian-like") return WeightDist::GaussianLike;
  throw ConfigError("unknown weight distribution '" + std::string(name) + "'");
}

std::string_view to_string(WeightDist d) noexcept {
  switch (d) {
    case WeightDist::Unit: return "unit";
    case WeightDist::RandomSign: return "sign";
    case WeightDist::GaussianLike: return "gaussian";
  }
  return "?";
}

namespace {

std::int64_t threshold_for_cut(const std::vector<std::pair<std::int64_t, long double>>& dist, double cut) {
  // largest support value v with Pr(sum <= v) <= cut; the term sum > v then
  // cuts off at most `cut`.
  std::int64_t theta = dist.front().first - 1;
  long double cdf = 0;
  for (const auto& [v, p] : dist) {
    cdf += p;
    if (cdf > cut) break;
    theta = v;
  }
  return theta;
}

}  // namespace

CompositeSpec random_intersection(unsigned n, std::size_t k, std::uint64_t seed, const IntersectionOptions& opt) {
  CompositeSpec spec(n, Combiner::And);
  if (k == 0) return spec;
  if (!(opt.cut_lo >= 0 && opt.cut_hi >= opt.cut_lo)) throw ConfigError("cut-off band must satisfy 0 <= lo <= hi");
  CounterRng rng(seed);
  std::vector<std::pair<std::int64_t, long double>> binomial_dist;
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<std::int64_t> w(n);
    for (auto& v : w) {
      switch (opt.dist) {
        case WeightDist::Unit: v = 1; break;
        case WeightDist::RandomSign: v = rng.coin() ? 1 : -1; break;
        case WeightDist::GaussianLike:
          v = static_cast<std::int64_t>(rng.below(11) + rng.below(11) + rng.below(11)) - 15;
          break;
      }
    }
    const double cut = std::min(1.0, (opt.cut_lo + (opt.cut_hi - opt.cut_lo) * rng.uniform()) / static_cast<double>(k));
    std::int64_t theta;
    if (opt.dist == WeightDist::GaussianLike) {
      theta = threshold_for_cut(linear_form_distribution(w), cut);
    } else {
      // +-1 weights all share the binomial law of sum x_i
      if (binomial_dist.empty()) binomial_dist = linear_form_distribution(std::vector<std::int64_t>(n, 1));
      theta = threshold_for_cut(binomial_dist, cut);
    }
    spec.add_term(LinearThresholdFunction(std::move(w), theta));
  }
  return spec;
}

std::vector<TruthTable> random_unate_terms(unsigned n, std::size_t k, std::uint64_t seed) {
  CounterRng rng(seed);
  const unsigned width = std::clamp<unsigned>(
      static_cast<unsigned>(std::lround(std::log2(static_cast<double>(std::max<std::size_t>(k, 2))))), 1, n);
  std::vector<TruthTable> terms;
  terms.reserve(k);
  for (std::size_t t = 0; t < k; ++t) {
    // `width` distinct random literals with random polarity
    std::vector<unsigned> vars(n);
    for (unsigned i = 0; i < n; ++i) vars[i] = i;
    for (unsigned i = 0; i < width; ++i) std::swap(vars[i], vars[i + rng.below(n - i)]);
    TruthTable term = TruthTable::constant(n, true);
    for (unsigned i = 0; i < width; ++i) term &= literal_table(n, vars[i], rng.coin());
    terms.push_back(std::move(term));
  }
  return terms;
}

// ---------------------------------------------------------------------------

BinnedNoiseDraw binned_pair_with_bins(std::span<const std::uint32_t> bins, unsigned m, CounterRng& rng) {
  if (m == 0) throw DomainError("binning needs m >= 1");
  BinnedNoiseDraw d;
  d.m = m;
  d.bins.assign(bins.begin(), bins.end());
  const std::size_t n = bins.size();
  d.z.resize(n);
  d.b.resize(m);
  for (auto& v : d.z) v = rng.coin() ? 1 : -1;
  for (auto& v : d.b) v = rng.coin() ? 1 : -1;
  d.chosen_bin = static_cast<std::uint32_t>(rng.below(m));
  d.b_prime = d.b;
  d.b_prime[d.chosen_bin] = static_cast<std::int8_t>(-d.b_prime[d.chosen_bin]);
  d.x.resize(n);
  d.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (bins[i] >= m) throw DomainError("bin index out of range");
    d.x[i] = static_cast<std::int8_t>(d.z[i] * d.b[bins[i]]);
    d.y[i] = static_cast<std::int8_t>(d.z[i] * d.b_prime[bins[i]]);
  }
  return d;
}

BinnedNoiseDraw binned_pair(unsigned n, unsigned m, std::uint64_t seed) {
  if (m == 0 || m > n) throw DomainError("binning needs 1 <= m <= n");
  CounterRng rng(seed);
  std::vector<std::uint32_t> bins(n);
  for (auto& b : bins) b = static_cast<std::uint32_t>(rng.below(m));
  return binned_pair_with_bins(bins, m, rng);
}

Rational binning_distribution_check(unsigned n, unsigned m) {
  if (n == 0 || n > 6) throw ResourceCapError("binning enumeration needs 1 <= n <= 6");
  if (m == 0 || m > n) throw DomainError("binning needs 1 <= m <= n");
  const std::uint64_t points = 1ULL << n;
  const std::uint64_t full = points - 1;
  std::uint64_t assignments = 1;
  for (unsigned i = 0; i < n; ++i) assignments *= m;

  std::vector<std::uint64_t> counts(points * points, 0);
  std::vector<std::uint32_t> bins(n);
  std::vector<std::uint64_t> bin_mask(m);
  for (std::uint64_t a = 0; a < assignments; ++a) {
    std::uint64_t code = a;
    std::fill(bin_mask.begin(), bin_mask.end(), 0);
    for (unsigned i = 0; i < n; ++i) {
      bins[i] = static_cast<std::uint32_t>(code % m);
      code /= m;
      bin_mask[bins[i]] |= 1ULL << i;
    }
    for (std::uint64_t bsel = 0; bsel < (1ULL << m); ++bsel) {
      // coordinates whose bin sign is +1
      std::uint64_t plus = 0;
      for (unsigned j = 0; j < m; ++j)
        if ((bsel >> j) & 1u) plus |= bin_mask[j];
      for (std::uint64_t z = 0; z < points; ++z) {
        const std::uint64_t x = ~(z ^ plus) & full;  // x_i = z_i * b_bin(i)
        for (unsigned c = 0; c < m; ++c) ++counts[(x << n) | (x ^ bin_mask[c])];
      }
    }
  }
  // Common denominator T = m^n 2^n 2^m m; direct law times T is
  // (m-1)^{n-d} 2^m m.
  const BigInt total = BigInt(std::to_string(assignments)) * static_cast<unsigned long>(points) *
                       static_cast<unsigned long>(1ULL << m) * static_cast<unsigned long>(m);
  BigInt abs_sum = 0;
  for (std::uint64_t x = 0; x < points; ++x) {
    for (std::uint64_t y = 0; y < points; ++y) {
      const unsigned d = bits::popcount(x ^ y);
      BigInt direct;
      mpz_ui_pow_ui(direct.get_mpz_t(), m - 1, n - d);
      direct *= static_cast<unsigned long>((1ULL << m) * m);
      const BigInt diff = BigInt(std::to_string(counts[(x << n) | y])) - direct;
      abs_sum += abs(diff);
    }
  }
  Rational tv(abs_sum, 2 * total);
  tv.canonicalize();
  return tv;
}

CompositeSpec restrict_spec(const CompositeSpec& spec, std::span<const std::uint32_t> bins,
                            std::span<const std::int8_t> z, unsigned m) {
  const unsigned n = spec.num_vars();
  if (bins.size() != n || z.size() != n) throw DimensionError("restriction: bins/z length must equal n");
  if (m == 0 || m > kMaxTableVars) throw DomainError("restriction needs 1 <= m <= 30");
  CompositeSpec out(m, spec.combiner());
  for (const auto& term : spec.terms()) {
    if (const auto* f = std::get_if<LinearThresholdFunction>(&term)) {
      std::vector<std::int64_t> w(m, 0);
      for (unsigned i = 0; i < n; ++i) w[bins[i]] += f->weights()[i] * z[i];
      const bool fits = std::all_of(w.begin(), w.end(), [](auto v) { return v >= -kMaxWeight && v <= kMaxWeight; });
      if (fits) {
        out.add_term(LinearThresholdFunction(std::move(w), f->threshold()));
        continue;
      }
    }
    // pointwise restriction
    const TruthTable src = truth_table(term);
    TruthTable g(m);
    for (std::uint64_t b = 0; b < g.size(); ++b) {
      std::uint64_t x = 0;
      for (unsigned i = 0; i < n; ++i) {
        const int bi = ((b >> bins[i]) & 1u) ? 1 : -1;
        if (z[i] * bi > 0) x |= 1ULL << i;
      }
      g.set(b, src.get(x));
    }
    out.add_term(std::move(g));
  }
  return out;
}

TruthTable restricted_function(const CompositeSpec& spec, std::span<const std::uint32_t> bins,
                               std::span<const std::int8_t> z, unsigned m) {
  return truth_table(restrict_spec(spec, bins, z, m));
}

Rational restricted_sensitivity_mean(const CompositeSpec& spec, unsigned m) {
  const unsigned n = spec.num_vars();
  if (n > 6) throw ResourceCapError("restriction enumeration needs n <= 6");
  if (m == 0 || m > n) throw DomainError("binning needs 1 <= m <= n");
  std::uint64_t assignments = 1;
  for (unsigned i = 0; i < n; ++i) assignments *= m;
  const TruthTable f = truth_table(spec);
  const std::uint64_t full = (1ULL << n) - 1;
  std::vector<std::uint64_t> bin_mask(m);
  const std::uint64_t points_g = 1ULL << m;
  const std::uint64_t fbits = f.words()[0];
  std::vector<std::uint64_t> spread(points_g);
  // low_half[j]: points of the m-cube with coordinate j clear
  std::vector<std::uint64_t> low_half(m, 0);
  for (unsigned j = 0; j < m; ++j)
    for (std::uint64_t b = 0; b < points_g; ++b)
      if (!((b >> j) & 1u)) low_half[j] |= 1ULL << b;
  std::uint64_t edge_total = 0;
  for (std::uint64_t a = 0; a < assignments; ++a) {
    std::uint64_t code = a;
    std::fill(bin_mask.begin(), bin_mask.end(), 0);
    for (unsigned i = 0; i < n; ++i) {
      bin_mask[code % m] |= 1ULL << i;
      code /= m;
    }
    spread[0] = 0;
    for (std::uint64_t b = 1; b < points_g; ++b)
      spread[b] = spread[b & (b - 1)] | bin_mask[std::countr_zero(b)];
    // zm bit i set <=> z_i = +1; x_i = z_i b_{bin(i)}. g fits in one word.
    for (std::uint64_t zm = 0; zm <= full; ++zm) {
      std::uint64_t g = 0;
      for (std::uint64_t b = 0; b < points_g; ++b) g |= ((fbits >> (~(zm ^ spread[b]) & full)) & 1u) << b;
      for (unsigned j = 0; j < m; ++j) edge_total += std::popcount((g ^ (g >> (1u << j))) & low_half[j]);
    }
  }
  // E[as(g)] / m = edges / 2^{m-1} / (m^n 2^n) / m
  Rational r = from_u64(edge_total) * pow2(1 - static_cast<long>(m) - static_cast<long>(n)) /
               (from_u64(assignments) * m);
  r.canonicalize();
  return r;
}

unsigned noise_bins(double eps) {
  if (!(eps > 0 && eps < 1)) throw DomainError("noise rate must lie in (0,1)");
  return static_cast<unsigned>(std::ceil(1.0 / eps - 1e-12));
}

}  // namespace halfsens

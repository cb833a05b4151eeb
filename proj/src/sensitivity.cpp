#include "halfsens/sensitivity.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "halfsens/error.hpp"
#include "halfsens/orientation.hpp"
#include "halfsens/parallel.hpp"
#include "halfsens/random.hpp"

namespace halfsens {

SensitivityReport average_sensitivity_exact(const TruthTable& t) {
  const unsigned n = t.num_vars();
  if (n > kMaxExactSensitivityVars)
    throw ResourceCapError("exact average sensitivity needs n <= 26, got " + std::to_string(n));
  SensitivityReport r;
  r.n = n;
  r.per_direction.resize(n);
  for (unsigned i = 0; i < n; ++i) {
    r.per_direction[i] = boundary_edges(t, i);
    r.boundary_edges += r.per_direction[i];
  }
  r.as_exact = n == 0 ? Rational{0} : from_u64(r.boundary_edges) * pow2(1 - static_cast<long>(n));
  r.as_exact.canonicalize();
  r.mean = from_u64(t.count_ones()) * pow2(-static_cast<long>(n));
  r.mean.canonicalize();
  return r;
}

std::string_view to_string(McMode mode) noexcept {
  return mode == McMode::FullScan ? "full-scan" : "sampled-direction";
}

namespace {

// Samples are split into fixed chunks (not per worker) and reduced with
// integer sums, so the result does not depend on the thread count.
constexpr std::size_t kChunks = 64;

struct Tally {
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;
};

void random_point(CounterRng& rng, std::span<std::int8_t> x) {
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if ((i & 63) == 0) word = rng();
    x[i] = ((word >> (i & 63)) & 1u) ? 1 : -1;
  }
}

template <class PerSample>
Tally run_chunks(std::uint64_t samples, PerSample&& per_sample) {
  std::vector<Tally> chunks(kChunks);
  parallel_for(kChunks, [&](std::size_t c) {
    const std::uint64_t begin = samples * c / kChunks;
    const std::uint64_t end = samples * (c + 1) / kChunks;
    Tally local;
    per_sample(begin, end, local);
    chunks[c] = local;
  });
  Tally total;
  for (const auto& t : chunks) {
    total.sum += t.sum;
    total.sum_sq += t.sum_sq;
  }
  return total;
}

void finish(MonteCarloEstimate& est, const Tally& tally, double scale) {
  const double n = static_cast<double>(est.samples);
  const double mean = static_cast<double>(tally.sum) / n;
  const double var = n > 1 ? (static_cast<double>(tally.sum_sq) - n * mean * mean) / (n - 1) : 0.0;
  est.estimate = scale * mean;
  est.std_error = scale * std::sqrt(std::max(0.0, var) / n);
}

}  // namespace

MonteCarloEstimate average_sensitivity_mc(const CompositeSpec& spec, std::uint64_t samples, std::uint64_t seed,
                                          McMode mode) {
  if (samples == 0) throw DomainError("Monte Carlo needs at least one sample");
  const unsigned n = spec.num_vars();
  MonteCarloEstimate est{0, 0, samples, seed, mode};
  const Tally tally = run_chunks(samples, [&](std::uint64_t begin, std::uint64_t end, Tally& out) {
    StreamingEvaluator eval(spec);
    SignVector x(n);
    for (std::uint64_t j = begin; j < end; ++j) {
      CounterRng rng(derive_seed(seed, j));
      random_point(rng, x);
      eval.load(x);
      const bool fx = eval.value();
      std::uint64_t count = 0;
      if (mode == McMode::SampledDirection) {
        const auto i = static_cast<std::uint32_t>(rng.below(n));
        count = eval.value_with_flips({&i, 1}) != fx;
      } else {
        for (std::uint32_t i = 0; i < n; ++i) count += eval.value_with_flips({&i, 1}) != fx;
      }
      out.sum += count;
      out.sum_sq += count * count;
    }
  });
  finish(est, tally, mode == McMode::SampledDirection ? static_cast<double>(n) : 1.0);
  return est;
}

std::vector<std::uint64_t> disagreement_by_distance(const TruthTable& t) {
  const unsigned n = t.num_vars();
  if (n > kMaxNoiseEnumVars)
    throw ResourceCapError("pair enumeration needs n <= 20, got " + std::to_string(n));
  std::vector<std::uint64_t> counts(n + 1, 0);
  for (std::uint64_t z = 1; z < t.size(); ++z) {
    const TruthTable shifted = xor_permute(t, z);
    std::uint64_t differ = 0;
    auto a = t.words();
    auto b = shifted.words();
    for (std::size_t j = 0; j < a.size(); ++j) differ += bits::popcount(a[j] ^ b[j]);
    counts[std::popcount(z)] += differ;
  }
  return counts;
}

Rational noise_sensitivity_exact_enum(const TruthTable& t, const Rational& rho) {
  if (rho <= 0 || rho >= 1) throw DomainError("noise rate must lie in (0,1)");
  const unsigned n = t.num_vars();
  const auto counts = disagreement_by_distance(t);
  Rational total = 0;
  for (unsigned d = 1; d <= n; ++d)
    if (counts[d] != 0) total += from_u64(counts[d]) * pow(rho, d) * pow(1 - rho, n - d);
  total *= pow2(-static_cast<long>(n));
  total.canonicalize();
  return total;
}

MonteCarloEstimate noise_sensitivity_mc(const CompositeSpec& spec, double eps, std::uint64_t samples,
                                        std::uint64_t seed) {
  if (!(eps > 0 && eps < 1)) throw DomainError("noise rate must lie in (0,1)");
  if (samples == 0) throw DomainError("Monte Carlo needs at least one sample");
  const unsigned n = spec.num_vars();
  MonteCarloEstimate est{0, 0, samples, seed, McMode::SampledDirection};
  const Tally tally = run_chunks(samples, [&](std::uint64_t begin, std::uint64_t end, Tally& out) {
    StreamingEvaluator eval(spec);
    SignVector x(n);
    std::vector<std::uint32_t> flipped;
    for (std::uint64_t j = begin; j < end; ++j) {
      CounterRng rng(derive_seed(seed, j));
      random_point(rng, x);
      flipped.clear();
      for (std::uint32_t i = 0; i < n; ++i)
        if (rng.uniform() < eps) flipped.push_back(i);
      eval.load(x);
      const std::uint64_t differ = eval.value() != eval.value_with_flips(flipped);
      out.sum += differ;
      out.sum_sq += differ;
    }
  });
  finish(est, tally, 1.0);
  return est;
}

Rational correlation_statistic(const TruthTable& s, std::span<const int> sigma) {
  const unsigned n = s.num_vars();
  if (sigma.size() != n) throw DimensionError("sign vector length does not match table");
  const auto ones = static_cast<std::int64_t>(s.count_ones());
  // sum_x S(x) x_i = (#ones with x_i = +1) - (#ones with x_i = -1)
  std::int64_t total = 0;
  for (unsigned i = 0; i < n; ++i) {
    const auto plus = static_cast<std::int64_t>(ones_with_var_set(s, i));
    total += sigma[i] * (2 * plus - ones);
  }
  Rational r = make_rational(total) * pow2(-static_cast<long>(n));
  r.canonicalize();
  return r;
}

std::vector<ClaimViolation> claim_pointwise_check(const TruthTable& prev, const TruthTable& term) {
  if (prev.num_vars() != term.num_vars()) throw DimensionError("claim check: dimension mismatch");
  if (!orientation(term).unate()) throw DomainError("claim check: the added term must be unate");
  const TruthTable cur = prev | term;
  std::vector<ClaimViolation> violations;
  for (std::uint64_t x = 0; x < prev.size(); ++x) {
    for (unsigned i = 0; i < prev.num_vars(); ++i) {
      const std::uint64_t y = x ^ (1ULL << i);
      const int dc = static_cast<int>(cur.get(x)) - static_cast<int>(cur.get(y));
      const int dp = static_cast<int>(prev.get(x)) - static_cast<int>(prev.get(y));
      const int xi = ((x >> i) & 1u) ? 1 : -1;
      const int lhs = std::abs(dc) - std::abs(dp);
      const int rhs = xi * (dc - dp);
      if (lhs > rhs) violations.push_back({x, i, lhs, rhs});
    }
  }
  return violations;
}

bool TelescopingLedger::holds() const {
  for (const auto& r : rows)
    if (r.delta_as > r.corr) return false;
  return true;
}

TelescopingLedger telescoping_audit(std::span<const TruthTable> terms, double c) {
  if (terms.empty()) throw DomainError("telescoping audit needs at least one term");
  const unsigned n = terms.front().num_vars();
  if (n > kMaxNoiseEnumVars) throw ResourceCapError("telescoping audit needs n <= 20");
  TelescopingLedger ledger;
  ledger.n = n;
  TruthTable prev(n);
  Rational prev_as = 0;
  for (std::size_t m = 0; m < terms.size(); ++m) {
    if (terms[m].num_vars() != n) throw DimensionError("telescoping audit: terms differ in dimension");
    const Orientation o = orientation(terms[m]);
    if (!o.unate()) throw DomainError("telescoping audit: term " + std::to_string(m + 1) + " is not unate");
    const TruthTable cur = prev | terms[m];
    const TruthTable increment = cur & ~prev;
    const auto sigma = o.sign_vector();

    LedgerRow row;
    row.m = static_cast<unsigned>(m + 1);
    row.p = from_u64(increment.count_ones()) * pow2(-static_cast<long>(n));
    row.p.canonicalize();
    const Rational cur_as = average_sensitivity_exact(cur).as_exact;
    row.delta_as = cur_as - prev_as;
    row.corr = 2 * correlation_statistic(increment, sigma);
    const double p = row.p.get_d();
    row.bound = p > 0 ? c * p * std::sqrt(n * std::log(1.0 / p)) : 0.0;

    ledger.total_mass += row.p;
    ledger.corr_total += row.corr;
    ledger.rows.push_back(std::move(row));
    prev = cur;
    prev_as = cur_as;
  }
  ledger.as_total = prev_as;
  return ledger;
}

void write_report_csv_header(std::ostream& out) {
  out << "function_id,n,k,B,as_num,as_den,mean_num,mean_den\n";
}

void write_report_csv_row(std::ostream& out, std::string_view function_id, std::size_t k,
                          const SensitivityReport& r) {
  out << function_id << ',' << r.n << ',' << k << ',' << r.boundary_edges << ',' << r.as_exact.get_num() << ','
      << r.as_exact.get_den() << ',' << r.mean.get_num() << ',' << r.mean.get_den() << '\n';
}

void write_ledger_csv(std::ostream& out, const TelescopingLedger& ledger) {
  out << "m,p_m,delta_as,corr,bound\n";
  char buf[32];
  for (const auto& r : ledger.rows) {
    std::snprintf(buf, sizeof buf, "%.10g", r.bound);
    out << r.m << ',' << r.p << ',' << r.delta_as << ',' << r.corr << ',' << buf << '\n';
  }
}

}  // namespace halfsens

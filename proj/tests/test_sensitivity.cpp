#include <gtest/gtest.h>

#include <sstream>

#include "halfsens/constructions.hpp"
#include "halfsens/error.hpp"
#include "halfsens/fourier.hpp"
#include "halfsens/ltf.hpp"
#include "halfsens/orientation.hpp"
#include "halfsens/sensitivity.hpp"
#include "support/oracles.hpp"

using namespace halfsens;

namespace {

Rational q(long a, long b = 1) { return make_rational(a, b); }

TruthTable parity(unsigned n) {
  return TruthTable::from_function(n, [](std::uint64_t x) { return std::popcount(x) & 1; });
}

TruthTable dictator(unsigned n, unsigned i) { return truth_table(LinearThresholdFunction::dictator(n, i)); }

TruthTable maj(unsigned n) { return truth_table(LinearThresholdFunction::unit(n, 0)); }

CompositeSpec as_spec(const TruthTable& t) { return CompositeSpec(t.num_vars(), Combiner::And, {t}); }

}  // namespace

TEST(AverageSensitivity, Examples) {
  EXPECT_EQ(average_sensitivity_exact(parity(7)).as_exact, 7);
  EXPECT_EQ(average_sensitivity_exact(TruthTable::constant(5, true)).as_exact, 0);
  const auto r = average_sensitivity_exact(maj(3));
  EXPECT_EQ(r.as_exact, q(3, 2));
  EXPECT_EQ(r.mean, q(1, 2));
  EXPECT_EQ(r.boundary_edges, 6u);
}

TEST(AverageSensitivity, MajorityClosedForm) {
  // n C(n-1, (n-1)/2) / 2^{n-1}
  for (unsigned n : {3u, 5u, 7u, 9u, 11u}) {
    BigInt c;
    mpz_bin_uiui(c.get_mpz_t(), n - 1, (n - 1) / 2);
    const Rational expect = Rational(BigInt(n) * c) * pow2(-static_cast<long>(n - 1));
    EXPECT_EQ(average_sensitivity_exact(maj(n)).as_exact, expect) << n;
  }
}

TEST(AverageSensitivity, MatchesNaiveCount) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const unsigned n = 1 + seed % 11;
    const CompositeSpec spec = random_intersection(n, 1 + seed % 4, seed);
    ASSERT_EQ(average_sensitivity_exact(truth_table(spec)).as_exact,
              oracle::average_sensitivity(oracle::of(spec), n))
        << seed;
  }
}

TEST(AverageSensitivity, TribesFixture) {
  const TruthTable t = oracle::tribes(3, 4);
  EXPECT_EQ(average_sensitivity_exact(t).as_exact, oracle::average_sensitivity(oracle::of(t), 12));
}

TEST(AverageSensitivityMc, Examples) {
  const auto c = average_sensitivity_mc(as_spec(TruthTable::constant(6, false)), 1000, 1);
  EXPECT_EQ(c.estimate, 0);
  EXPECT_EQ(c.std_error, 0);

  const auto p = average_sensitivity_mc(as_spec(parity(8)), 100000, 2);
  EXPECT_NEAR(p.estimate, 8, 3 * p.std_error + 1e-12);

  const CompositeSpec maj9(9, Combiner::And, {LinearThresholdFunction::unit(9, 0)});
  const double exact = to_double(average_sensitivity_exact(maj(9)).as_exact);
  for (McMode mode : {McMode::SampledDirection, McMode::FullScan}) {
    const auto e = average_sensitivity_mc(maj9, 100000, 3, mode);
    EXPECT_NEAR(e.estimate, exact, 3 * e.std_error) << to_string(mode);
  }
}

TEST(AverageSensitivityMc, IndependentOfWorkerCount) {
  const CompositeSpec spec = random_intersection(40, 5, 9);
  setenv("HS_THREADS", "1", 1);
  const auto a = average_sensitivity_mc(spec, 5000, 4);
  setenv("HS_THREADS", "8", 1);
  const auto b = average_sensitivity_mc(spec, 5000, 4);
  unsetenv("HS_THREADS");
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(NoiseSensitivityEnum, Examples) {
  EXPECT_EQ(noise_sensitivity_exact_enum(dictator(4, 1), q(1, 3)), q(1, 3));
  EXPECT_EQ(noise_sensitivity_exact_enum(TruthTable::constant(4, true), q(1, 5)), 0);
  EXPECT_EQ(noise_sensitivity_exact_enum(maj(3), q(1, 4)), ns_from_spectrum(wht(maj(3)), q(1, 4)));
  EXPECT_THROW(noise_sensitivity_exact_enum(maj(3), q(0)), DomainError);
}

TEST(NoiseSensitivityEnum, MatchesPairOracle) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const unsigned n = 2 + seed;
    const TruthTable t = truth_table(random_intersection(n, 3, seed));
    const Rational rho = q(1, 3 + static_cast<long>(seed));
    ASSERT_EQ(noise_sensitivity_exact_enum(t, rho), oracle::noise_sensitivity_pairs(oracle::of(t), n, rho));
  }
}

TEST(DisagreementByDistance, CountsOrderedPairs) {
  const auto counts = disagreement_by_distance(dictator(2, 0));
  // f(x) != f(y) iff x_1 != y_1: distance 1 -> 4 ordered pairs, distance 2 -> 4.
  EXPECT_EQ(counts, (std::vector<std::uint64_t>{0, 4, 4}));
}

TEST(NoiseSensitivityMc, Examples) {
  const auto c = noise_sensitivity_mc(as_spec(TruthTable::constant(5, true)), 0.2, 5000, 1);
  EXPECT_EQ(c.estimate, 0);
  const CompositeSpec d(6, Combiner::And, {LinearThresholdFunction::dictator(6, 3)});
  const auto e = noise_sensitivity_mc(d, 0.1, 100000, 2);
  EXPECT_NEAR(e.estimate, 0.1, 3 * e.std_error);
  const CompositeSpec m3(3, Combiner::And, {LinearThresholdFunction({1, 1, 1}, 0)});
  const auto m = noise_sensitivity_mc(m3, 0.25, 100000, 3);
  EXPECT_NEAR(m.estimate, to_double(noise_sensitivity_exact_enum(maj(3), q(1, 4))), 3 * m.std_error);
}

TEST(CorrelationStatistic, Examples) {
  const std::vector<int> plus{1, 1, 1};
  EXPECT_EQ(correlation_statistic(TruthTable::constant(3, true), plus), 0);
  EXPECT_EQ(correlation_statistic(maj(3), plus), q(3, 4));
  EXPECT_EQ(correlation_statistic(truth_table(LinearThresholdFunction::unit(3, 2)), plus), q(3, 8));
}

TEST(MonotoneIdentity, AsIsTwiceCorrelationWithSum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const unsigned n = 2 + seed % 9;
    const TruthTable f = oracle::random_monotone(n, seed);
    Rational direct = 0;
    for (std::uint64_t x = 0; x < f.size(); ++x)
      if (f.get(x)) direct += 2 * std::popcount(x) - static_cast<long>(n);
    direct /= pow2(n);
    ASSERT_EQ(average_sensitivity_exact(f).as_exact, 2 * direct) << seed;
    ASSERT_EQ(correlation_statistic(f, std::vector<int>(n, 1)), direct) << seed;
  }
}

TEST(ClaimCheck, Examples) {
  const TruthTable zero = TruthTable::constant(3, false);
  EXPECT_TRUE(claim_pointwise_check(maj(3), zero).empty());
  EXPECT_TRUE(claim_pointwise_check(zero, maj(3)).empty());
  EXPECT_THROW(claim_pointwise_check(zero, parity(3)), DomainError);
  EXPECT_THROW(claim_pointwise_check(zero, maj(5)), DimensionError);
}

TEST(ClaimCheck, UnnormalizedTermsCanViolate) {
  // F_prev = 0 and f = [x_1 = -1]: flipping x_1 from -1 to +1 drops f, so
  // |delta| = 1 while x_i * delta = -1.
  const TruthTable f = truth_table(LinearThresholdFunction::dictator(3, 0, -1));
  const auto v = claim_pointwise_check(TruthTable::constant(3, false), f);
  ASSERT_FALSE(v.empty());
  for (const auto& e : v) EXPECT_GT(e.lhs, e.rhs);
}

TEST(ClaimCheck, RandomNormalizedFamiliesHaveNoViolations) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const unsigned n = 3 + seed % 6;
    const auto terms = random_unate_terms(n, 4, seed);
    TruthTable prev(n);
    for (std::size_t i = 0; i + 1 < terms.size(); ++i) prev |= terms[i];
    const auto [g, sigma] = normalize_increasing(terms.back(), orientation(terms.back()));
    std::uint64_t z = 0;
    for (unsigned i = 0; i < n; ++i)
      if (sigma[i] < 0) z |= 1ULL << i;
    ASSERT_TRUE(claim_pointwise_check(xor_permute(prev, z), g).empty()) << seed;
  }
}

TEST(Telescoping, Examples) {
  const std::vector<TruthTable> one{maj(3)};
  const auto l1 = telescoping_audit(one);
  ASSERT_EQ(l1.rows.size(), 1u);
  EXPECT_EQ(l1.rows[0].delta_as, q(3, 2));
  EXPECT_GE(l1.rows[0].corr, l1.rows[0].delta_as);
  EXPECT_TRUE(l1.holds());

  const std::vector<TruthTable> two{dictator(2, 0), dictator(2, 1)};
  const auto l2 = telescoping_audit(two);
  EXPECT_EQ(l2.total_mass, q(3, 4));
  EXPECT_EQ(l2.as_total, 1);
  EXPECT_TRUE(l2.holds());

  const std::vector<TruthTable> copies(3, maj(3));
  const auto l3 = telescoping_audit(copies);
  for (std::size_t m = 1; m < 3; ++m) {
    EXPECT_EQ(l3.rows[m].p, 0);
    EXPECT_EQ(l3.rows[m].delta_as, 0);
  }
  EXPECT_THROW(telescoping_audit(std::vector<TruthTable>{}), DomainError);
  EXPECT_THROW(telescoping_audit(std::vector<TruthTable>{parity(3)}), DomainError);
}

TEST(Telescoping, TotalsMatchDirectComputation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const unsigned n = 4 + seed % 5;
    const auto terms = random_unate_terms(n, 1 + seed % 6, seed);
    const auto ledger = telescoping_audit(terms);
    TruthTable F(n);
    for (const auto& t : terms) F |= t;
    EXPECT_EQ(ledger.as_total, average_sensitivity_exact(F).as_exact);
    EXPECT_EQ(ledger.total_mass, from_u64(F.count_ones()) / pow2(n));
    EXPECT_TRUE(ledger.holds());
    EXPECT_LE(ledger.as_total, ledger.corr_total);
  }
}

TEST(Csv, ReportAndLedgerHeaders) {
  std::ostringstream a, b;
  write_report_csv_header(a);
  write_report_csv_row(a, "maj3", 1, average_sensitivity_exact(maj(3)));
  EXPECT_EQ(a.str(), "function_id,n,k,B,as_num,as_den,mean_num,mean_den\nmaj3,3,1,6,3,2,1,2\n");
  write_ledger_csv(b, telescoping_audit(std::vector<TruthTable>{maj(3)}));
  EXPECT_EQ(b.str().substr(0, b.str().find('\n')), "m,p_m,delta_as,corr,bound");
}

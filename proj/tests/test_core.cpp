#include <gtest/gtest.h>

#include <sstream>

#include "halfsens/composite.hpp"
#include "halfsens/error.hpp"
#include "halfsens/ltf.hpp"
#include "halfsens/orientation.hpp"
#include "halfsens/spec_io.hpp"
#include "halfsens/truth_table.hpp"
#include "support/oracles.hpp"

using namespace halfsens;

namespace {

LinearThresholdFunction maj3() { return LinearThresholdFunction({1, 1, 1}, 0); }

TruthTable parity(unsigned n) {
  return TruthTable::from_function(n, [](std::uint64_t x) { return std::popcount(x) & 1; });
}

LinearThresholdFunction random_ltf(unsigned n, CounterRng& rng) {
  std::vector<std::int64_t> w(n);
  std::int64_t total = 0;
  for (auto& v : w) {
    v = static_cast<std::int64_t>(rng.below(9)) - 4;
    total += std::abs(v);
  }
  const auto theta = static_cast<std::int64_t>(rng.below(2 * total + 1)) - total;
  return LinearThresholdFunction(w, theta);
}

}  // namespace

TEST(TruthTable, ConstantZeroHasNoOnes) {
  const TruthTable t = truth_table(CompositeSpec(3, Combiner::Or));
  EXPECT_EQ(t.size(), 8u);
  EXPECT_EQ(t.count_ones(), 0u);
  EXPECT_TRUE(t.is_constant());
}

TEST(TruthTable, DictatorUsesBitZeroForFirstCoordinate) {
  const TruthTable t = truth_table(LinearThresholdFunction::dictator(2, 0));
  for (std::uint64_t x = 0; x < 4; ++x) EXPECT_EQ(t.get(x), (x & 1) != 0) << x;
}

TEST(TruthTable, Majority3) {
  const TruthTable t = truth_table(maj3());
  for (std::uint64_t x = 0; x < 8; ++x) EXPECT_EQ(t.get(x), std::popcount(x) >= 2) << x;
  EXPECT_EQ(t.count_ones(), 4u);
}

TEST(TruthTable, FastLtfTableMatchesPointwiseEvaluation) {
  CounterRng rng(11);
  for (unsigned n : {1u, 3u, 5u, 6u, 7u, 9u, 12u}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto f = random_ltf(n, rng);
      const TruthTable t = truth_table(f);
      for (std::uint64_t x = 0; x < t.size(); ++x) ASSERT_EQ(t.get(x), f(HypercubePoint(n, x))) << n << " " << x;
    }
  }
}

TEST(TruthTable, FlipVarAndXorPermuteAgreeWithDefinition) {
  CounterRng rng(5);
  for (unsigned n : {2u, 5u, 6u, 8u, 10u}) {
    const TruthTable t = truth_table(random_ltf(n, rng));
    for (unsigned i = 0; i < n; ++i) {
      const TruthTable g = flip_var(t, i);
      for (std::uint64_t x = 0; x < t.size(); ++x) ASSERT_EQ(g.get(x), t.get(x ^ (1ULL << i)));
    }
    const std::uint64_t z = rng.below(t.size());
    const TruthTable g = xor_permute(t, z);
    for (std::uint64_t x = 0; x < t.size(); ++x) ASSERT_EQ(g.get(x), t.get(x ^ z));
  }
}

TEST(TruthTable, BoundaryEdgesMatchNaiveCount) {
  CounterRng rng(8);
  for (unsigned n : {1u, 4u, 6u, 7u, 9u}) {
    const auto f = random_ltf(n, rng);
    const TruthTable t = truth_table(f);
    std::uint64_t total = 0;
    for (unsigned i = 0; i < n; ++i) total += boundary_edges(t, i);
    EXPECT_EQ(total, oracle::boundary_edges(oracle::of(t), n));
  }
}

TEST(TruthTable, HammingDilateIsNeighbourhoodUnion) {
  const unsigned n = 7;
  TruthTable t(n);
  t.set(5, true);
  t.set(100, true);
  const TruthTable g = hamming_dilate(t);
  for (std::uint64_t x = 0; x < t.size(); ++x) {
    const bool expect = std::popcount(x ^ 5) <= 1 || std::popcount(x ^ 100) <= 1;
    ASSERT_EQ(g.get(x), expect) << x;
  }
}

TEST(TruthTable, ComplementIsInvolution) {
  EXPECT_EQ(complement(TruthTable::constant(4, false)), TruthTable::constant(4, true));
  CounterRng rng(3);
  const TruthTable t = truth_table(random_ltf(9, rng));
  EXPECT_EQ(complement(complement(t)), t);
}

TEST(TruthTable, SmallTablesKeepPaddingBitsClear) {
  const TruthTable t = complement(TruthTable::constant(3, false));
  EXPECT_EQ(t.words()[0], 0xFFu);
  EXPECT_EQ(t.count_ones(), 8u);
}

TEST(TruthTable, HsttRoundTrip) {
  CounterRng rng(21);
  for (unsigned n : {1u, 3u, 10u}) {
    const TruthTable t = truth_table(random_ltf(n, rng));
    std::stringstream buf;
    write_hstt(buf, t);
    const std::string bytes = buf.str();
    ASSERT_EQ(bytes.substr(0, 4), "HSTT");
    EXPECT_EQ(bytes.size(), 8 + std::max<std::size_t>(1, (t.size() + 7) / 8));
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), n);
    EXPECT_EQ(read_hstt(buf), t);
  }
}

TEST(TruthTable, RejectsMismatchedShapes) {
  TruthTable a(3), b(4);
  EXPECT_THROW(a &= b, DimensionError);
}

TEST(Ltf, ConstructionChecks) {
  EXPECT_THROW(LinearThresholdFunction({kMaxWeight + 1}, 0), DomainError);
  EXPECT_TRUE(LinearThresholdFunction::constant(3, true)(HypercubePoint(3, 0)));
  EXPECT_FALSE(LinearThresholdFunction::constant(3, false)(HypercubePoint(3, 7)));
}

TEST(Ltf, FlipSignsExamples) {
  const auto d = LinearThresholdFunction::dictator(3, 0);
  const std::vector<int> ones{1, 1, 1}, first{-1, 1, 1};
  EXPECT_EQ(flip_signs(d, ones), d);
  EXPECT_EQ(flip_signs(d, first), LinearThresholdFunction::dictator(3, 0, -1));

  const auto thr = LinearThresholdFunction::unit(3, 1);
  const std::vector<int> s{-1, -1, 1};
  const TruthTable a = truth_table(thr), b = truth_table(flip_signs(thr, s));
  EXPECT_EQ(a.count_ones(), 1u);
  EXPECT_EQ(b.count_ones(), 1u);
  EXPECT_TRUE(b.get(0b100));
}

TEST(Ltf, ComplementIsPointwiseNegation) {
  CounterRng rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const auto f = random_ltf(6, rng);
    EXPECT_EQ(truth_table(complement(f)), complement(truth_table(f)));
  }
}

TEST(Ltf, LinearFormDistributionSumsToOne) {
  const std::vector<std::int64_t> w{3, -1, 2, 2};
  long double total = 0;
  for (auto [v, p] : linear_form_distribution(w)) total += p;
  EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-15);
}

TEST(Composite, DeMorganByEnumeration) {
  CounterRng rng(9);
  CompositeSpec spec(5, Combiner::And, {random_ltf(5, rng), random_ltf(5, rng), random_ltf(5, rng)});
  const TruthTable and_table = truth_table(spec);
  TruthTable or_of_complements(5);
  for (const auto& term : spec.terms()) or_of_complements |= complement(truth_table(term));
  EXPECT_EQ(complement(and_table), or_of_complements);
  EXPECT_EQ(truth_table(complement(spec)), or_of_complements);
}

TEST(Composite, EmptyCombinersAreConstants) {
  EXPECT_EQ(truth_table(CompositeSpec(4, Combiner::And)), TruthTable::constant(4, true));
  EXPECT_EQ(truth_table(CompositeSpec(4, Combiner::Or)), TruthTable::constant(4, false));
}

TEST(Composite, DimensionMismatchAndCaps) {
  CompositeSpec spec(4, Combiner::And);
  EXPECT_THROW(spec.add_term(maj3()), DimensionError);
  EXPECT_THROW(truth_table(CompositeSpec(31, Combiner::And)), ResourceCapError);
}

TEST(Composite, StreamingEvaluatorMatchesDirectEvaluation) {
  CounterRng rng(17);
  const unsigned n = 9;
  CompositeSpec spec(n, Combiner::Or, {random_ltf(n, rng), truth_table(random_ltf(n, rng)), random_ltf(n, rng)});
  StreamingEvaluator eval(spec);
  for (std::uint64_t x = 0; x < (1ULL << n); x += 7) {
    const SignVector s = to_signs(HypercubePoint(n, x));
    eval.load(s);
    ASSERT_EQ(eval.value(), spec(HypercubePoint(n, x)));
    const std::vector<std::uint32_t> flips{1, 4};
    ASSERT_EQ(eval.value_with_flips(flips), spec(HypercubePoint(n, x ^ 0b10010)));
  }
}

TEST(Orientation, Examples) {
  const Orientation par = orientation(parity(2));
  EXPECT_EQ(par.directions, (std::vector<Direction>{Direction::Mixed, Direction::Mixed}));
  EXPECT_FALSE(par.unate());

  const LinearThresholdFunction f({3, -2, 0}, 2);
  const Orientation o = orientation(truth_table(f));
  EXPECT_EQ(o.directions, (std::vector<Direction>{Direction::Increasing, Direction::Decreasing, Direction::Constant}));
  EXPECT_TRUE(o.unate());
  EXPECT_EQ(orientation(f), o);

  const Orientation c = orientation(TruthTable::constant(3, true));
  EXPECT_EQ(c.directions, std::vector<Direction>(3, Direction::Constant));
  EXPECT_TRUE(c.unate());
}

TEST(Orientation, NormalizeIncreasing) {
  const TruthTable m = truth_table(maj3());
  auto [same, sigma] = normalize_increasing(m, orientation(m));
  EXPECT_EQ(same, m);
  EXPECT_EQ(sigma, (std::vector<int>{1, 1, 1}));

  const TruthTable neg = truth_table(LinearThresholdFunction({-1, -1, -1}, 0));
  auto [flipped, s2] = normalize_increasing(neg, orientation(neg));
  EXPECT_EQ(flipped, m);
  EXPECT_EQ(s2, (std::vector<int>{-1, -1, -1}));

  EXPECT_THROW(normalize_increasing(parity(3), orientation(parity(3))), DomainError);
}

TEST(SpecIo, RoundTripAndErrors) {
  CompositeSpec spec(3, Combiner::Or, {maj3(), LinearThresholdFunction::dictator(3, 2, -1)});
  const auto doc = to_json(spec);
  EXPECT_EQ(doc["combiner"], "OR");
  const CompositeSpec back = spec_from_json(doc);
  EXPECT_EQ(truth_table(back), truth_table(spec));

  EXPECT_THROW(spec_from_json(nlohmann::json{{"n", 2}}), ConfigError);
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"n":2,"combiner":"XOR","terms":[]})")), ConfigError);
  EXPECT_THROW(
      spec_from_json(nlohmann::json::parse(R"({"n":2,"combiner":"AND","terms":[{"weights":[1],"threshold":0}]})")),
      std::exception);
}

#include <gtest/gtest.h>

#include <sstream>

#include "halfsens/constructions.hpp"
#include "halfsens/error.hpp"
#include "halfsens/learner.hpp"
#include "halfsens/ltf.hpp"
#include "support/oracles.hpp"

using namespace halfsens;

namespace {

std::vector<LabeledSample> label_cube(unsigned n, const std::function<int(std::uint64_t)>& f) {
  std::vector<LabeledSample> s;
  for (std::uint64_t x = 0; x < (1ULL << n); ++x) s.push_back({x, f(x)});
  return s;
}

double oracle_loss(const std::vector<LabeledSample>& samples, unsigned n, unsigned d) {
  std::vector<std::vector<double>> phi;
  std::vector<double> y;
  for (const auto& s : samples) {
    const auto feats = parity_features(HypercubePoint(n, s.x), d);
    phi.emplace_back(feats.begin(), feats.end());
    y.push_back(s.label);
  }
  return oracle::l1_optimum_by_vertices(phi, y);
}

}  // namespace

TEST(DegreeFor, Examples) {
  EXPECT_EQ(degree_for(2, 1.0, 1.0, 10), 1u);
  EXPECT_EQ(degree_for(4, 0.5, 2.0, 20), 12u);
  EXPECT_EQ(degree_for(4, 0.5, 2.0, 9), 9u);
  EXPECT_THROW(degree_for(4, 0.5, 0.0, 9), DomainError);
  EXPECT_THROW(degree_for(1, 0.5, 1.0, 9), DomainError);
  EXPECT_THROW(degree_for(2, 0.0, 1.0, 9), DomainError);
}

TEST(Features, Examples) {
  EXPECT_EQ(parity_features(HypercubePoint(3, 5), 0), std::vector<int>{1});
  EXPECT_EQ(parity_features(HypercubePoint(4, 15), 2), std::vector<int>(feature_count(4, 2), 1));
  EXPECT_EQ(parity_features(HypercubePoint(2, 0b01), 2), (std::vector<int>{1, 1, -1, -1}));
  EXPECT_EQ(low_degree_masks(3, 1), (std::vector<std::uint64_t>{0, 1, 2, 4}));
  EXPECT_EQ(feature_count(10, 3), 1u + 10 + 45 + 120);
}

TEST(L1Regress, ZeroLabelsGiveZeroPolynomial) {
  const auto p = l1_regress(label_cube(4, [](std::uint64_t) { return 0; }), 4, 2);
  EXPECT_NEAR(p.loss, 0, 1e-9);
  for (double c : p.coeffs) EXPECT_NEAR(c, 0, 1e-6);
}

TEST(L1Regress, DictatorIsInterpolated) {
  const auto p = l1_regress(label_cube(5, [](std::uint64_t x) { return static_cast<int>(x & 1); }), 5, 1);
  EXPECT_NEAR(p.loss, 0, 1e-6);
  EXPECT_NEAR(p.coeffs[0], 0.5, 1e-5);
  EXPECT_NEAR(p.coeffs[1], 0.5, 1e-5);
  for (std::size_t j = 2; j < p.coeffs.size(); ++j) EXPECT_NEAR(p.coeffs[j], 0, 1e-5);
}

TEST(L1Regress, ParityAtDegreeOneMatchesVertexOracle) {
  for (unsigned n : {2u, 3u, 4u}) {
    const auto samples = label_cube(n, [](std::uint64_t x) { return std::popcount(x) & 1; });
    const auto p = l1_regress(samples, n, 1);
    EXPECT_NEAR(p.loss, oracle_loss(samples, n, 1), 1e-6) << n;
    EXPECT_NEAR(p.loss, 0.5, 1e-6) << n;
  }
}

TEST(L1Regress, RandomLabelsMatchVertexOracle) {
  CounterRng rng(3);
  for (unsigned n : {3u, 4u}) {
    for (unsigned d : {1u, 2u}) {
      for (int rep = 0; rep < 3; ++rep) {
        const auto samples = label_cube(n, [&](std::uint64_t) { return static_cast<int>(rng.coin()); });
        const auto p = l1_regress(samples, n, d);
        EXPECT_NEAR(p.loss, oracle_loss(samples, n, d), 1e-6) << n << " " << d;
        EXPECT_LE(p.gap(), 1e-6);
      }
    }
  }
}

TEST(L1Regress, DenseDesignOnSampledPointsMatchesOracle) {
  CounterRng rng(8);
  const unsigned n = 4, d = 1;
  std::vector<LabeledSample> samples;
  for (int j = 0; j < 14; ++j) samples.push_back({rng.below(16), static_cast<int>(rng.coin())});
  const auto p = l1_regress(samples, n, d);
  EXPECT_EQ(p.method, "admm-l1/dense-qr");
  EXPECT_NEAR(p.loss, oracle_loss(samples, n, d), 1e-6);
}

TEST(L1Regress, PermutationEquivariance) {
  const unsigned n = 4, d = 2;
  const auto f = [](std::uint64_t x) { return static_cast<int>(((x & 1) && (x & 4)) || (x & 8)); };
  // swap coordinates 0 and 3
  const auto swap = [](std::uint64_t m) {
    const std::uint64_t b0 = m & 1, b3 = (m >> 3) & 1;
    return (m & ~9ULL) | (b0 << 3) | b3;
  };
  const auto p = l1_regress(label_cube(n, f), n, d);
  const auto q = l1_regress(label_cube(n, [&](std::uint64_t x) { return f(swap(x)); }), n, d);
  EXPECT_NEAR(p.loss, q.loss, 1e-6);
  for (std::uint64_t x = 0; x < 16; ++x) EXPECT_NEAR(p(swap(x)), q(x), 1e-3);
}

TEST(L1Regress, Errors) {
  EXPECT_THROW(l1_regress({}, 3, 1), DomainError);
  EXPECT_THROW(l1_regress(label_cube(3, [](std::uint64_t) { return 1; }), 3, 4), DomainError);
  L1Options tight;
  tight.max_features = 5;
  EXPECT_THROW(l1_regress(label_cube(4, [](std::uint64_t) { return 1; }), 4, 2, tight), ResourceCapError);
}

TEST(AgnosticLearn, SingleHalfspaceFullCube) {
  const TruthTable t = truth_table(random_intersection(10, 1, 5));
  LearnOptions opt;
  opt.full_cube = true;
  const auto [h, r] = agnostic_learn([&](std::uint64_t x) { return t.get(x); }, 10, 1, 0.2, opt);
  EXPECT_LE(r.holdout_error, 0.2);
  EXPECT_LE(r.cube_error, 0.2);
}

TEST(AgnosticLearn, TwoUnitHalfspacesSampled) {
  IntersectionOptions unit;
  unit.dist = WeightDist::Unit;
  const TruthTable t = truth_table(random_intersection(12, 2, 6, unit));
  LearnOptions opt;
  opt.samples = 10000;
  opt.seed = 4;
  opt.C = 0.1;  // keeps d small enough for a 10^4-sample dense fit
  const auto [h, r] = agnostic_learn([&](std::uint64_t x) { return t.get(x); }, 12, 2, 0.25, opt);
  EXPECT_EQ(r.samples, 10000u);
  EXPECT_LE(r.cube_error, 0.25 + 0.05);
}

TEST(AgnosticLearn, ParityLabelsReportedHonestly) {
  LearnOptions opt;
  opt.full_cube = true;
  opt.C = 0.05;
  const auto [h, r] =
      agnostic_learn([](std::uint64_t x) { return (std::popcount(x) & 1) != 0; }, 8, 2, 0.5, opt);
  EXPECT_LT(r.d, 8u);
  EXPECT_NEAR(r.cube_error, 0.5, 0.1);
}

TEST(ModelIo, RoundTrip) {
  const auto p = l1_regress(label_cube(4, [](std::uint64_t x) { return static_cast<int>(x == 15); }), 4, 2);
  const auto back = model_from_json(model_to_json(p));
  EXPECT_EQ(back.masks, p.masks);
  EXPECT_EQ(back.coeffs, p.coeffs);
  EXPECT_EQ(back.method, p.method);
  EXPECT_THROW(model_from_json(nlohmann::json::parse(R"({"n":2})")), ConfigError);
}

TEST(DatasetIo, RoundTrip) {
  CounterRng rng(2);
  const auto s = draw_samples([](std::uint64_t x) { return x % 3 == 0; }, 9, 50, rng);
  std::stringstream buf;
  write_dataset_csv(buf, s);
  const auto back = read_dataset_csv(buf);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    EXPECT_EQ(back[j].x, s[j].x);
    EXPECT_EQ(back[j].label, s[j].label);
  }
  std::stringstream bad("a,b\n");
  EXPECT_THROW(read_dataset_csv(bad), ConfigError);
}

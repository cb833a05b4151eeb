#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "halfsens/error.hpp"
#include "halfsens/experiments.hpp"

using namespace halfsens;
using nlohmann::json;

namespace {

std::string render(const ExperimentResult& r) {
  std::ostringstream out;
  for (const auto& t : r.tables) t.write(out, json::object());
  return out.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("halfsens_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HSENS_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsPerKind) {
  const auto c = config_from_json(json{{"kind", "as-upper"}});
  EXPECT_EQ(c.n, (std::vector<unsigned>{12, 14, 16, 18, 20, 22}));
  EXPECT_EQ(c.k.front(), 2u);
  EXPECT_EQ(c.k.back(), 256u);
  EXPECT_EQ(c.trials, 3u);
  EXPECT_EQ(c.raw["kind"], "as-upper");

  const auto ns = config_from_json(json{{"kind", "ns-scaling"}});
  EXPECT_EQ(ns.n, std::vector<unsigned>{1000});
  EXPECT_EQ(ns.eps.size(), 7u);
  EXPECT_DOUBLE_EQ(ns.eps.back(), 1.0 / 256);
}

TEST(Config, Ranges) {
  const auto c = config_from_json(json::parse(R"({"kind":"as-upper","n":{"from":8,"to":12,"step":2},
                                                   "k":{"from":2,"to":32,"factor":4}})"));
  EXPECT_EQ(c.n, (std::vector<unsigned>{8, 10, 12}));
  EXPECT_EQ(c.k, (std::vector<std::uint64_t>{2, 8, 32}));
}

TEST(Config, Errors) {
  EXPECT_THROW(config_from_json(json::parse(R"({"kind":"as-upper","bogus":1})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"n":[3]})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"kind":"nope"})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"kind":"as-upper","n":[]})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"kind":"as-upper","eps":[1.5]})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"kind":"as-upper","families":["cauchy"]})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"kind":"as-upper","n":[2.5]})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"kind":"as-upper","trials":0})")), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(FitRatio, ExactModelHasNoDrift) {
  std::vector<FitPoint> pts;
  for (unsigned n : {8u, 16u, 24u}) {
    FitPoint p{n, 16, 0, 0, false};
    p.value = 0.7 * sqrt_n_log_k(p);
    pts.push_back(p);
  }
  const auto fit = fit_ratio(pts);
  EXPECT_NEAR(fit.a, 0.7, 1e-12);
  EXPECT_NEAR(fit.point_drift, 0, 1e-12);
  EXPECT_NEAR(fit.slice_drift, 0, 1e-12);
  EXPECT_EQ(fit.slices.size(), 3u);
  EXPECT_EQ(fit.flagged_count(false), 0u);
}

TEST(FitRatio, ZeroValuesFitZero) {
  std::vector<FitPoint> pts{{8, 2, 0, 0, false}, {8, 4, 0, 0, false}, {8, 8, 0, 0, false}};
  const auto fit = fit_ratio(pts);
  EXPECT_EQ(fit.a, 0);
  EXPECT_EQ(fit.flagged_count(false), 0u);
}

TEST(FitRatio, ControlsAreFlaggedNotFitted) {
  std::vector<FitPoint> pts;
  for (unsigned n : {10u, 12u, 14u}) {
    FitPoint p{n, 4, 0, 0, false};
    p.value = sqrt_n_log_k(p);
    pts.push_back(p);
    pts.push_back({n, 4, 0, static_cast<double>(n), true});  // parity: as = n
  }
  const auto fit = fit_ratio(pts);
  EXPECT_NEAR(fit.a, 1, 1e-12);
  EXPECT_EQ(fit.flagged_count(true), 3u);
  EXPECT_EQ(fit.flagged_count(false), 0u);
}

TEST(FitRatio, SliceDriftSeparatesAxes) {
  // value = a(k) * g with a depending only on k: constant along n-slices
  // refit over all k, drifting along k-slices.
  std::vector<FitPoint> pts;
  for (unsigned n : {8u, 12u, 16u})
    for (std::uint64_t k : {2u, 4u}) {
      FitPoint p{n, k, 0, 0, false};
      p.value = (k == 2 ? 1.0 : 2.0) * sqrt_n_log_k(p);
      pts.push_back(p);
    }
  EXPECT_NEAR(fit_ratio(pts, sqrt_n_log_k, SliceAxis::N).slice_drift, 0, 1e-12);
  EXPECT_GT(fit_ratio(pts, sqrt_n_log_k, SliceAxis::K).slice_drift, 0.2);
}

TEST(FitRatio, Errors) {
  std::vector<FitPoint> two{{8, 2, 0, 1, false}, {9, 2, 0, 1, false}, {9, 2, 0, 1, false}};
  EXPECT_THROW(fit_ratio(two), DomainError);
  std::vector<FitPoint> bad_scale{{8, 1, 0, 1, false}, {9, 2, 0, 1, false}, {10, 2, 0, 1, false}};
  EXPECT_THROW(fit_ratio(bad_scale), DomainError);
}

TEST(Experiments, ClaimAuditSmall) {
  const auto c = config_from_json(json::parse(R"({"kind":"claim-audit","n":[5],"k":[3],"trials":6,"seed":4})"));
  const auto r = compute(c);
  const auto& t = r.table("claim-audit");
  ASSERT_EQ(t.rows.size(), 6u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(t.number(i, "violations"), 0);
    EXPECT_EQ(t.number(i, "ledger_holds"), 1);
    EXPECT_EQ(t.number(i, "pairs_checked"), 3 * 32 * 5);
  }
}

TEST(Experiments, BinningCheckSmall) {
  const auto c = config_from_json(json::parse(R"({"kind":"binning-check","n":[1,2,3],"k":[1,2]})"));
  const auto r = compute(c);
  const auto& t = r.table("binning-check");
  // 6 TV rows, then k in {1,2} x m in 2..n for n = 2, 3.
  EXPECT_EQ(t.rows.size(), 6u + 2 * (1 + 2));
  for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_EQ(t.number(i, "match"), 1) << i;
}

TEST(Experiments, AsUpperSmallRunsWithControls) {
  const auto c = config_from_json(
      json::parse(R"({"kind":"as-upper","n":[6,8,10],"k":[2,4],"trials":2,"seed":3,"families":["sign","parity"]})"));
  const auto r = compute(c);
  // parity is deterministic and runs once per grid point
  EXPECT_EQ(r.table("as-upper").rows.size(), 3u * 2 * (2 + 1));
  const auto& fit = r.table("as-upper_fit");
  std::size_t controls = 0;
  for (std::size_t i = 0; i < fit.rows.size(); ++i)
    if (fit.number(i, "control") == 1) {
      ++controls;
      EXPECT_EQ(fit.number(i, "flagged"), 1);
    }
  EXPECT_EQ(controls, 6u);
}

TEST(Experiments, AsLowerSmall) {
  const auto c = config_from_json(json::parse(R"({"kind":"as-lower","n":[8,10],"k":[4,16],"trials":3,"seed":1})"));
  const auto r = compute(c);
  EXPECT_EQ(r.table("as-lower").rows.size(), 2u * 2 * 3);
  const auto& audit = r.table("as-lower_audit");
  for (std::size_t i = 0; i < audit.rows.size(); ++i) EXPECT_GT(audit.number(i, "mean_as"), 0);
}

TEST(Experiments, FourierTailAndLearnSmall) {
  const auto f = compute(config_from_json(
      json::parse(R"({"kind":"fourier-tail","n":[8],"k":[2,4],"eps":[0.5],"trials":1,"families":["sign"]})")));
  const auto& ft = f.table("fourier-tail");
  for (std::size_t i = 0; i < ft.rows.size(); ++i)
    if (ft.number(i, "capped") == 0) EXPECT_EQ(ft.number(i, "below_eps"), 1);
  const auto l = compute(config_from_json(json::parse(R"({"kind":"learn","n":[6],"k":[1,2],"eps":[0.25]})")));
  const auto& lt = l.table("learn");
  ASSERT_EQ(lt.rows.size(), 2u);
  for (std::size_t i = 0; i < lt.rows.size(); ++i) EXPECT_LE(lt.number(i, "cube_error"), 0.25);
}

TEST(Experiments, ResourceCaps) {
  EXPECT_THROW(compute(config_from_json(json::parse(R"({"kind":"binning-check","n":[7]})"))), ResourceCapError);
  EXPECT_THROW(compute(config_from_json(json::parse(R"({"kind":"claim-audit","n":[21]})"))), ResourceCapError);
}

TEST(Experiments, DeterministicAcrossRunsAndWorkers) {
  const auto c = config_from_json(
      json::parse(R"({"kind":"as-upper","n":[6,8],"k":[2,4,8],"trials":2,"seed":5,"families":["sign","unate"]})"));
  setenv("HS_THREADS", "1", 1);
  const std::string a = render(compute(c));
  setenv("HS_THREADS", "4", 1);
  const std::string b = render(compute(c));
  unsetenv("HS_THREADS");
  EXPECT_EQ(a, b);
  EXPECT_EQ(render(compute(c)), a);
}

TEST(Experiments, RunWritesConfigEchoAndPlot) {
  const auto dir = scratch("run");
  const auto c = config_from_json(
      json::parse(R"({"kind":"as-upper","n":[6,8,10],"k":[2,4],"trials":1,"families":["sign"]})"));
  const auto files = run(c, dir);
  ASSERT_FALSE(files.empty());
  std::ifstream in(dir / "as-upper.csv");
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.rfind("# config: ", 0), 0u);
  EXPECT_EQ(json::parse(first.substr(10)), c.raw);
  EXPECT_TRUE(std::filesystem::exists(dir / "as-upper.svg"));
  std::filesystem::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  const auto good = dir / "good.json";
  const auto bad = dir / "bad.json";
  const auto big = dir / "big.json";
  std::ofstream(good) << R"({"kind":"binning-check","n":[2],"k":[1]})";
  std::ofstream(bad) << R"({"kind":"binning-check","colour":1})";
  std::ofstream(big) << R"({"kind":"binning-check","n":[9]})";
  EXPECT_EQ(run_cli("experiment " + good.string() + " --out " + (dir / "out").string()), 0);
  EXPECT_EQ(run_cli("experiment " + bad.string()), 2);
  EXPECT_EQ(run_cli("experiment " + big.string()), 3);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("construct lower-bound --n 10 --k 8 --seed 1 --out " + (dir / "lb.json").string()), 0);
  EXPECT_EQ(run_cli("analyze " + (dir / "lb.json").string() + " --exact --fourier"), 0);
  EXPECT_EQ(run_cli("analyze " + (dir / "lb.json").string() + " --ns 0"), 2);
  std::filesystem::remove_all(dir);
}

// hsens: command-line front end for the halfsens library.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "halfsens/constructions.hpp"
#include "halfsens/error.hpp"
#include "halfsens/experiments.hpp"
#include "halfsens/fourier.hpp"
#include "halfsens/learner.hpp"
#include "halfsens/sensitivity.hpp"
#include "halfsens/spec_io.hpp"

using namespace halfsens;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;

json rational_json(const Rational& r) { return {{"exact", r.get_str()}, {"value", to_double(r)}}; }

json mc_json(const MonteCarloEstimate& e) {
  return {{"estimate", e.estimate},
          {"std_error", e.std_error},
          {"samples", e.samples},
          {"seed", e.seed},
          {"mode", std::string(to_string(e.mode))}};
}

struct AnalyzeArgs {
  std::string spec;
  bool exact = false;
  std::uint64_t mc = 0;
  std::optional<double> ns;
  bool fourier = false;
  std::uint64_t seed = 0;
};

int analyze(const AnalyzeArgs& a) {
  const CompositeSpec spec = load_spec(a.spec);
  const unsigned n = spec.num_vars();
  const bool exact = a.mc == 0;
  if (a.exact && a.mc) throw ConfigError("--exact and --mc are exclusive");

  json out = {{"n", n}, {"k", spec.num_terms()}, {"combiner", spec.combiner() == Combiner::And ? "AND" : "OR"}};
  out["mode"] = exact ? "exact" : "mc";

  std::optional<TruthTable> table;
  if (exact) {
    if (n > kMaxExactSensitivityVars)
      throw ResourceCapError("exact analysis needs n <= " + std::to_string(kMaxExactSensitivityVars) + ", got " +
                             std::to_string(n) + "; use --mc N");
    table = truth_table(spec, kMaxExactSensitivityVars);
    const SensitivityReport r = average_sensitivity_exact(*table);
    out["boundary_edges"] = r.boundary_edges;
    out["as"] = rational_json(r.as_exact);
    out["mean"] = rational_json(r.mean);
    if (spec.num_terms() >= 2)
      out["as_ratio"] = to_double(r.as_exact) / std::sqrt(n * std::log(static_cast<double>(spec.num_terms())));
  } else {
    out["as"] = mc_json(average_sensitivity_mc(spec, a.mc, a.seed));
  }

  if (a.ns) {
    const unsigned m = noise_bins(*a.ns);
    json ns = {{"eps_requested", *a.ns}, {"eps", 1.0 / m}, {"bins", m}};
    if (exact) {
      if (n > kMaxNoiseEnumVars)
        throw ResourceCapError("exact noise sensitivity needs n <= " + std::to_string(kMaxNoiseEnumVars) +
                               "; use --mc N");
      ns["ns"] = rational_json(ns_from_spectrum(wht(*table), make_rational(1, m)));
    } else {
      ns["ns"] = mc_json(noise_sensitivity_mc(spec, 1.0 / m, a.mc, derive_seed(a.seed, 1)));
    }
    out["noise_sensitivity"] = ns;
  }

  if (a.fourier) {
    if (!table) throw ConfigError("--fourier needs exact mode");
    const DegreeWeightProfile profile = degree_profile(wht(*table));
    json weights = json::array(), tails = json::array();
    for (unsigned d = 0; d <= n; ++d) {
      weights.push_back(profile.weight(d).get_str());
      tails.push_back(tail_weight(profile, d).get_str());
    }
    out["fourier"] = {{"degree_weight", weights}, {"tail_weight", tails}};
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int construct_lower_bound(unsigned n, std::uint64_t k, std::uint64_t seed, const std::string& out_path) {
  const LowerBoundFamily fam = lower_bound_family(n, k, seed);
  const CompositeSpec spec = fam.union_spec();
  if (out_path.empty() || out_path == "-") {
    json doc = to_json(spec);
    doc["metadata"] = fam.metadata();
    std::cout << doc.dump(2) << '\n';
  } else {
    save_spec(out_path, spec, fam.metadata());
  }
  return 0;
}

int experiment(const std::string& config_path, const std::string& out_dir) {
  const ExperimentConfig config = load_config(config_path);
  for (const auto& file : run(config, out_dir)) std::cout << file.string() << '\n';
  return 0;
}

struct LearnArgs {
  std::string target;
  std::uint64_t k = 2;
  double eps = 0.2;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double C = 4.0;
  bool full_cube = false;
  std::string model;
};

int learn(const LearnArgs& a) {
  const CompositeSpec spec = load_spec(a.target);
  const unsigned n = spec.num_vars();
  std::optional<TruthTable> table;
  if (n <= kMaxTableVars) table = truth_table(spec);
  Target target = [&](std::uint64_t x) { return table ? table->get(x) : spec(HypercubePoint(n, x)); };

  LearnOptions opt;
  opt.C = a.C;
  opt.samples = a.samples;
  opt.full_cube = a.full_cube;
  opt.seed = a.seed;
  const auto [h, report] = agnostic_learn(target, n, a.k, a.eps, opt);
  if (!a.model.empty()) {
    std::ofstream out(a.model);
    if (!out) throw ConfigError("cannot write " + a.model);
    out << model_to_json(h.poly).dump(2) << '\n';
  }
  json out = {{"n", n},
              {"k", a.k},
              {"eps", a.eps},
              {"C", a.C},
              {"d", report.d},
              {"features", report.features},
              {"samples", report.samples},
              {"training_loss", report.training_loss},
              {"training_error", report.training_error},
              {"holdout_error", report.holdout_error},
              {"duality_gap", h.poly.gap()},
              {"method", h.poly.method}};
  if (n <= 24) out["cube_error"] = report.cube_error;
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensitivity of halfspace intersections: analysis, constructions, experiments, learning"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Average/noise sensitivity and Fourier profile of a spec");
  analyze_cmd->add_option("spec", an.spec, "spec JSON file")->required();
  auto* exact_flag = analyze_cmd->add_flag("--exact", an.exact, "Exhaustive evaluation (default)");
  analyze_cmd->add_option("--mc", an.mc, "Monte Carlo with N samples")->excludes(exact_flag);
  analyze_cmd->add_option("--ns", an.ns, "Noise sensitivity at rate EPS (rounded down to 1/ceil(1/EPS))");
  analyze_cmd->add_flag("--fourier", an.fourier, "Degree weights and tail weights");
  analyze_cmd->add_option("--seed", an.seed, "Seed for Monte Carlo");

  auto* construct_cmd = app.add_subcommand("construct", "Instance generators");
  construct_cmd->require_subcommand(1);
  unsigned lb_n = 0;
  std::uint64_t lb_k = 0, lb_seed = 0;
  std::string lb_out;
  auto* lb_cmd = construct_cmd->add_subcommand("lower-bound", "OR of random sign flips of a threshold halfspace");
  lb_cmd->add_option("--n", lb_n, "dimension")->required();
  lb_cmd->add_option("--k", lb_k, "number of halfspaces")->required();
  lb_cmd->add_option("--seed", lb_seed, "seed");
  lb_cmd->add_option("--out", lb_out, "output spec JSON (stdout if omitted)");

  std::string exp_config, exp_out = "results";
  auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment config");
  exp_cmd->add_option("config", exp_config, "experiment config JSON")->required();
  exp_cmd->add_option("--out", exp_out, "output directory");

  LearnArgs ln;
  auto* learn_cmd = app.add_subcommand("learn", "L1 polynomial regression learner");
  learn_cmd->add_option("--target", ln.target, "target spec JSON")->required();
  learn_cmd->add_option("--k", ln.k, "number of halfspaces in the class");
  learn_cmd->add_option("--eps", ln.eps, "accuracy parameter");
  learn_cmd->add_option("--samples", ln.samples, "training samples (0: default formula)");
  learn_cmd->add_option("--seed", ln.seed, "seed");
  learn_cmd->add_option("--C", ln.C, "degree constant");
  learn_cmd->add_flag("--full-cube", ln.full_cube, "train on all 2^n points");
  learn_cmd->add_option("--model", ln.model, "write the fitted model JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*analyze_cmd) return analyze(an);
    if (*lb_cmd) return construct_lower_bound(lb_n, lb_k, lb_seed, lb_out);
    if (*exp_cmd) return experiment(exp_config, exp_out);
    if (*learn_cmd) return learn(ln);
  } catch (const ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return kExitResource;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

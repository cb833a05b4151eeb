#include "halfsens/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include "halfsens/constructions.hpp"
#include "halfsens/error.hpp"
#include "halfsens/fourier.hpp"
#include "halfsens/learner.hpp"
#include "halfsens/orientation.hpp"
#include "halfsens/parallel.hpp"
#include "halfsens/random.hpp"
#include "halfsens/sensitivity.hpp"

namespace halfsens {

namespace {

using nlohmann::json;
using Row = std::vector<std::string>;

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::AsUpper, "as-upper"},       {ExperimentKind::AsLower, "as-lower"},
    {ExperimentKind::NsScaling, "ns-scaling"},   {ExperimentKind::ClaimAudit, "claim-audit"},
    {ExperimentKind::BinningCheck, "binning-check"}, {ExperimentKind::FourierTail, "fourier-tail"},
    {ExperimentKind::Learn, "learn"},
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(unsigned v) { return std::to_string(v); }
std::string flag(bool v) { return v ? "1" : "0"; }

std::uint64_t seed_for(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  for (auto t : tags) seed = derive_seed(seed, t);
  return seed;
}

// ---------------------------------------------------------------------------
// Config parsing

std::vector<double> numeric_grid(const json& v, const char* key, bool geometric_default) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(std::string("'") + key + "' entries must be numbers");
      out.push_back(e.get<double>());
    }
  } else if (v.is_object()) {
    for (const auto& [name, _] : v.items())
      if (name != "from" && name != "to" && name != "step" && name != "factor")
        throw ConfigError(std::string("'") + key + "' range has unknown field '" + name + "'");
    if (!v.contains("from") || !v.contains("to"))
      throw ConfigError(std::string("'") + key + "' range needs 'from' and 'to'");
    const double from = v["from"].get<double>();
    const double to = v["to"].get<double>();
    if (v.contains("step") && v.contains("factor"))
      throw ConfigError(std::string("'") + key + "' range takes 'step' or 'factor', not both");
    const bool geometric = v.contains("factor") || (!v.contains("step") && geometric_default);
    if (geometric) {
      const double factor = v.value("factor", 2.0);
      if (!(factor > 0) || factor == 1 || from <= 0)
        throw ConfigError(std::string("'") + key + "' geometric range needs from > 0 and factor != 1");
      const bool up = factor > 1;
      for (double x = from; up ? x <= to * (1 + 1e-12) : x >= to * (1 - 1e-12); x *= factor) {
        out.push_back(x);
        if (out.size() > 100000) throw ConfigError(std::string("'") + key + "' range is too long");
      }
    } else {
      const double step = v.value("step", 1.0);
      if (step == 0) throw ConfigError(std::string("'") + key + "' step must be nonzero");
      for (double x = from; step > 0 ? x <= to + 1e-12 : x >= to - 1e-12; x += step) {
        out.push_back(x);
        if (out.size() > 100000) throw ConfigError(std::string("'") + key + "' range is too long");
      }
    }
  } else {
    throw ConfigError(std::string("'") + key + "' must be an array or a {from, to, step|factor} range");
  }
  if (out.empty()) throw ConfigError(std::string("'") + key + "' grid is empty");
  return out;
}

template <class T>
std::vector<T> integer_grid(const json& v, const char* key, bool geometric_default) {
  std::vector<T> out;
  for (double x : numeric_grid(v, key, geometric_default)) {
    const double r = std::round(x);
    if (r < 0 || std::abs(r - x) > 1e-9) throw ConfigError(std::string("'") + key + "' needs non-negative integers");
    out.push_back(static_cast<T>(r));
  }
  return out;
}

std::vector<unsigned> range_u(unsigned from, unsigned to, unsigned step) {
  std::vector<unsigned> out;
  for (unsigned v = from; v <= to; v += step) out.push_back(v);
  return out;
}

std::vector<std::uint64_t> pow2_range(std::uint64_t from, std::uint64_t to) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = from; v <= to; v *= 2) out.push_back(v);
  return out;
}

void apply_defaults(ExperimentConfig& c, bool has_n, bool has_k, bool has_eps, bool has_trials, bool has_samples,
                    bool has_families) {
  switch (c.kind) {
    case ExperimentKind::AsUpper:
      if (!has_n) c.n = range_u(12, 22, 2);
      if (!has_k) c.k = pow2_range(2, 256);
      if (!has_trials) c.trials = 3;
      if (!has_families) c.families = {"sign", "gaussian", "unate", "parity"};
      break;
    case ExperimentKind::AsLower:
      if (!has_n) c.n = range_u(12, 22, 2);
      if (!has_trials) c.trials = 20;
      break;
    case ExperimentKind::NsScaling:
      if (!has_n) c.n = {1000};
      if (!has_k) c.k = pow2_range(2, 64);
      if (!has_eps)
        for (int j = 2; j <= 8; ++j) c.eps.push_back(std::ldexp(1.0, -j));
      if (!has_samples) c.samples = 20000;
      if (!has_families) c.families = {"sign", "lower-bound"};
      break;
    case ExperimentKind::ClaimAudit:
      if (!has_n) c.n = {8};
      if (!has_k) c.k = {5};
      if (!has_trials) c.trials = 500;
      break;
    case ExperimentKind::BinningCheck:
      if (!has_n) c.n = range_u(1, 5, 1);
      if (!has_k) c.k = {1, 2, 3};
      break;
    case ExperimentKind::FourierTail:
      if (!has_n) c.n = range_u(12, 16, 2);
      if (!has_k) c.k = pow2_range(2, 64);
      if (!has_eps) c.eps = {0.5, 0.4, 0.3, 0.25, 0.2};
      if (!has_trials) c.trials = 3;
      if (!has_families) c.families = {"sign", "gaussian", "unate"};
      break;
    case ExperimentKind::Learn:
      if (!has_n) c.n = {10, 12, 14};
      if (!has_k) c.k = {1, 2, 3, 4};
      if (!has_eps) c.eps = {0.2};
      if (!has_families) c.families = {"sign"};
      break;
  }
}

const std::set<std::string> kKnownFamilies = {"sign", "gaussian", "unit", "unate", "parity", "lower-bound"};

}  // namespace

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (const auto& [kind, text] : kKindNames)
    if (text == name) return kind;
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

std::string_view to_string(ExperimentKind kind) noexcept {
  for (const auto& [k, text] : kKindNames)
    if (k == kind) return text;
  return "?";
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
  static const std::set<std::string> known = {"kind", "n",      "k", "eps", "trials", "seed",
                                              "samples", "families", "C", "plots", "out"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw ConfigError("config needs a string 'kind'");

  ExperimentConfig c;
  try {
    c.kind = parse_experiment_kind(doc["kind"].get<std::string>());
    if (doc.contains("n")) c.n = integer_grid<unsigned>(doc["n"], "n", false);
    if (doc.contains("k")) c.k = integer_grid<std::uint64_t>(doc["k"], "k", true);
    if (doc.contains("eps")) c.eps = numeric_grid(doc["eps"], "eps", true);
    if (doc.contains("trials")) c.trials = doc["trials"].get<std::uint64_t>();
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("samples")) c.samples = doc["samples"].get<std::uint64_t>();
    if (doc.contains("families")) c.families = doc["families"].get<std::vector<std::string>>();
    if (doc.contains("C")) c.C = doc["C"].get<double>();
    if (doc.contains("plots")) c.plots = doc["plots"].get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  apply_defaults(c, doc.contains("n"), doc.contains("k"), doc.contains("eps"), doc.contains("trials"),
                 doc.contains("samples"), doc.contains("families"));

  if (c.trials == 0) throw ConfigError("'trials' must be positive");
  if (!(c.C > 0)) throw ConfigError("'C' must be positive");
  for (unsigned n : c.n)
    if (n == 0) throw ConfigError("'n' entries must be positive");
  for (double e : c.eps)
    if (!(e > 0 && e < 1)) throw ConfigError("'eps' entries must lie in (0, 1)");
  for (const auto& f : c.families)
    if (!kKnownFamilies.count(f)) throw ConfigError("unknown instance family '" + f + "'");

  c.raw = json::object();
  c.raw["kind"] = std::string(to_string(c.kind));
  c.raw["n"] = c.n;
  c.raw["k"] = c.k;
  json eps = json::array();
  for (double e : c.eps) eps.push_back(num(e));
  c.raw["eps"] = eps;
  c.raw["trials"] = c.trials;
  c.raw["seed"] = c.seed;
  c.raw["samples"] = c.samples;
  c.raw["families"] = c.families;
  c.raw["C"] = num(c.C);
  c.raw["plots"] = c.plots;
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

// ---------------------------------------------------------------------------
// Tables

std::size_t CsvTable::column(std::string_view col) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == col) return i;
  throw DomainError("table " + name + " has no column '" + std::string(col) + "'");
}

double CsvTable::number(std::size_t row, std::string_view col) const {
  return std::stod(rows.at(row).at(column(col)));
}

void CsvTable::write(std::ostream& out, const json& config) const {
  out << "# config: " << config.dump() << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

const CsvTable& ExperimentResult::table(std::string_view name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw DomainError("no result table '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Ratio fits

double sqrt_n_log_k(const FitPoint& p) {
  return std::sqrt(static_cast<double>(p.n) * std::log(static_cast<double>(p.k)));
}

double sqrt_eps_log_k(const FitPoint& p) { return std::sqrt(p.x * std::log(static_cast<double>(p.k))); }

std::size_t RatioFit::flagged_count(bool control) const {
  return static_cast<std::size_t>(std::count_if(residuals.begin(), residuals.end(), [&](const FitResidual& r) {
    return r.flagged && r.point.control == control;
  }));
}

RatioFit fit_ratio(const std::vector<FitPoint>& points, const ScaleModel& model, SliceAxis axis, double tolerance) {
  RatioFit fit;
  fit.tolerance = tolerance;
  std::set<std::tuple<unsigned, std::uint64_t, double>> distinct;
  double vg = 0, gg = 0;
  for (const auto& p : points) {
    FitResidual r;
    r.point = p;
    r.scale = model(p);
    if (!(r.scale > 0) || !std::isfinite(r.scale))
      throw DomainError("fit_ratio: model scale is not positive at n=" + std::to_string(p.n) +
                        ", k=" + std::to_string(p.k));
    r.ratio = p.value / r.scale;
    fit.residuals.push_back(r);
    if (!p.control) {
      distinct.insert({p.n, p.k, p.x});
      vg += p.value * r.scale;
      gg += r.scale * r.scale;
    }
  }
  if (distinct.size() < 3) throw DomainError("fit_ratio: degenerate grid, need at least 3 distinct points");
  fit.a = vg / gg;

  auto relative_to = [](double ratio, double a) {
    if (a > 0) return ratio / a;
    return ratio == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  };
  for (auto& r : fit.residuals) {
    r.relative = relative_to(r.ratio, fit.a);
    r.flagged = !(std::abs(r.relative - 1) <= tolerance);
    if (!r.point.control) fit.point_drift = std::max(fit.point_drift, std::abs(r.relative - 1));
  }

  std::map<double, std::pair<double, double>> slice_sums;
  std::map<double, std::size_t> slice_counts;
  for (const auto& r : fit.residuals) {
    if (r.point.control) continue;
    const double key = axis == SliceAxis::N   ? r.point.n
                       : axis == SliceAxis::K ? static_cast<double>(r.point.k)
                                              : r.point.x;
    slice_sums[key].first += r.point.value * r.scale;
    slice_sums[key].second += r.scale * r.scale;
    ++slice_counts[key];
  }
  for (const auto& [key, sums] : slice_sums) {
    SliceConstant s{key, sums.first / sums.second, slice_counts[key]};
    fit.slices.push_back(s);
    fit.slice_drift = std::max(fit.slice_drift, std::abs(relative_to(s.a, fit.a) - 1));
  }
  return fit;
}

namespace {

CsvTable fit_table(std::string name, const RatioFit& fit, std::uint64_t seed, std::string_view mode) {
  CsvTable t{std::move(name),
             {"n", "k", "x", "seed", "mode", "control", "value", "scale", "ratio", "relative", "flagged"},
             {}};
  for (const auto& r : fit.residuals)
    t.rows.push_back({num(r.point.n), num(r.point.k), num(r.point.x), num(seed), std::string(mode),
                      flag(r.point.control), num(r.point.value), num(r.scale), num(r.ratio), num(r.relative),
                      flag(r.flagged)});
  return t;
}

CsvTable slice_table(std::string name, const RatioFit& fit, std::string_view axis) {
  CsvTable t{std::move(name), {"scope", "key", "a", "points", "drift"}, {}};
  std::size_t fitted = 0;
  for (const auto& s : fit.slices) {
    t.rows.push_back({std::string(axis), num(s.key), num(s.a), num(static_cast<std::uint64_t>(s.points)),
                      num(fit.a > 0 ? std::abs(s.a / fit.a - 1) : 0.0)});
    fitted += s.points;
  }
  t.rows.push_back({"slices", "", num(fit.a), num(static_cast<std::uint64_t>(fitted)), num(fit.slice_drift)});
  t.rows.push_back({"points", "", num(fit.a), num(static_cast<std::uint64_t>(fitted)), num(fit.point_drift)});
  return t;
}

std::string rational_cell(const Rational& r) { return r.get_str(); }

// ---------------------------------------------------------------------------
// Instances

struct Instance {
  std::optional<CompositeSpec> spec;
  std::optional<TruthTable> table;
};

TruthTable parity_table(unsigned n) {
  return TruthTable::from_function(n, [](std::uint64_t idx) { return (std::popcount(idx) & 1) != 0; });
}

Instance make_instance(const std::string& family, unsigned n, std::uint64_t k, std::uint64_t seed) {
  Instance inst;
  if (family == "sign" || family == "gaussian" || family == "unit") {
    IntersectionOptions opt;
    opt.dist = family == "sign" ? WeightDist::RandomSign : family == "gaussian" ? WeightDist::GaussianLike : WeightDist::Unit;
    inst.spec = random_intersection(n, k, seed, opt);
  } else if (family == "unate") {
    if (n > kMaxTableVars) throw ResourceCapError("unate unions need n <= 30, got " + std::to_string(n));
    std::vector<Term> terms;
    for (auto& t : random_unate_terms(n, k, seed)) terms.emplace_back(std::move(t));
    inst.spec = CompositeSpec(n, Combiner::Or, std::move(terms));
  } else if (family == "lower-bound") {
    inst.spec = lower_bound_family(n, k, seed).intersection_spec();
  } else if (family == "parity") {
    if (n > kMaxTableVars) throw ResourceCapError("parity control needs n <= 30, got " + std::to_string(n));
    inst.table = parity_table(n);
  } else {
    throw ConfigError("unknown instance family '" + family + "'");
  }
  return inst;
}

TruthTable table_of(const Instance& inst, unsigned cap) {
  if (inst.table) return *inst.table;
  return truth_table(*inst.spec, cap);
}

void require_exact(unsigned n, unsigned cap, std::string_view what) {
  if (n > cap)
    throw ResourceCapError(std::string(what) + ": n = " + std::to_string(n) + " exceeds the exact cap of " +
                           std::to_string(cap));
}

std::size_t family_index(const std::string& f) {
  std::size_t i = 0;
  for (const auto& name : kKnownFamilies) {
    if (name == f) return i;
    ++i;
  }
  return i;
}

// ---------------------------------------------------------------------------
// as-upper

ExperimentResult run_as_upper(const ExperimentConfig& c) {
  for (unsigned n : c.n) require_exact(n, kMaxExactSensitivityVars, "as-upper");
  for (auto k : c.k)
    if (k < 2) throw ConfigError("as-upper needs k >= 2 (the model uses ln k)");

  struct Item {
    std::string family;
    unsigned n;
    std::uint64_t k, trial, seed;
    SensitivityReport report;
  };
  std::vector<Item> items;
  for (const auto& f : c.families)
    for (unsigned n : c.n)
      for (auto k : c.k)
        for (std::uint64_t t = 0; t < (f == "parity" ? 1 : c.trials); ++t)
          items.push_back({f, n, k, t, seed_for(c.seed, {family_index(f), n, k, t}), {}});

  parallel_for(items.size(), [&](std::size_t i) {
    auto& it = items[i];
    it.report = average_sensitivity_exact(table_of(make_instance(it.family, it.n, it.k, it.seed), kMaxExactSensitivityVars));
  });

  CsvTable main{"as-upper",
                {"n", "k", "seed", "mode", "family", "trial", "as_num", "as_den", "as", "ratio"},
                {}};
  std::map<std::pair<unsigned, std::uint64_t>, double> envelope;
  std::map<std::pair<unsigned, std::uint64_t>, double> controls;
  for (const auto& it : items) {
    const double as = to_double(it.report.as_exact);
    const double scale = std::sqrt(it.n * std::log(static_cast<double>(it.k)));
    main.rows.push_back({num(it.n), num(it.k), num(it.seed), "exact", it.family, num(it.trial),
                         it.report.as_exact.get_num().get_str(), it.report.as_exact.get_den().get_str(), num(as),
                         num(as / scale)});
    auto& slot = (it.family == "parity" ? controls : envelope)[{it.n, it.k}];
    slot = std::max(slot, as);
  }

  ExperimentResult res;
  res.tables.push_back(std::move(main));
  if (!envelope.empty()) {
    std::vector<FitPoint> pts;
    for (const auto& [key, v] : envelope) pts.push_back({key.first, key.second, 0, v, false});
    for (const auto& [key, v] : controls) pts.push_back({key.first, key.second, 0, v, true});
    if (pts.size() - controls.size() >= 3) {
      const RatioFit fit = fit_ratio(pts, sqrt_n_log_k, SliceAxis::N);
      res.tables.push_back(fit_table("as-upper_fit", fit, c.seed, "exact"));
      res.tables.push_back(slice_table("as-upper_slices", fit, "n"));
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// as-lower

ExperimentResult run_as_lower(const ExperimentConfig& c) {
  for (unsigned n : c.n) require_exact(n, 22, "as-lower");

  struct Item {
    unsigned n;
    std::uint64_t k, seed;
    UnionAuditReport audit;
    LowerBoundFamily family;
  };
  std::vector<Item> items;
  for (unsigned n : c.n) {
    const auto ks = c.k.empty() ? pow2_range(4, 1ULL << (n / 2)) : c.k;
    for (auto k : ks) {
      if (k < 2) throw ConfigError("as-lower needs k >= 2 (the model uses ln k)");
      if (n < 64 && k > (1ULL << n)) throw ConfigError("as-lower needs k <= 2^n");
      items.push_back({n, k, seed_for(c.seed, {n, k}), {}, {}});
    }
  }

  parallel_for(items.size(), [&](std::size_t i) {
    auto& it = items[i];
    it.audit = expected_union_sensitivity_audit(it.n, it.k, c.trials, it.seed);
    it.family = lower_bound_family(it.n, it.k, derive_seed(it.seed, 0));
  });

  CsvTable trials{"as-lower",
                  {"n", "k", "seed", "mode", "trial", "m", "theta", "clamped", "as_num", "as_den", "ratio"},
                  {}};
  CsvTable audit{"as-lower_audit",
                 {"n", "k", "seed", "mode", "trials", "mean_as", "mean_ratio", "best_trial", "audited_edges",
                  "covered_edges", "cover_probability"},
                 {}};
  std::vector<FitPoint> pts;
  for (const auto& it : items) {
    for (const auto& t : it.audit.trials)
      trials.rows.push_back({num(it.n), num(it.k), num(t.seed), "exact", num(t.trial), num(t.m),
                             std::to_string(it.family.base.threshold()), flag(it.family.clamped),
                             t.as.get_num().get_str(), t.as.get_den().get_str(), num(t.ratio)});
    audit.rows.push_back({num(it.n), num(it.k), num(it.seed), "exact", num(c.trials), num(it.audit.mean_as),
                          num(it.audit.mean_ratio), num(static_cast<std::uint64_t>(it.audit.best_trial)),
                          num(it.audit.audited_edges), num(it.audit.covered_edges),
                          num(it.audit.cover_probability)});
    pts.push_back({it.n, it.k, 0, it.audit.mean_as, false});
  }

  ExperimentResult res;
  res.tables.push_back(std::move(trials));
  res.tables.push_back(std::move(audit));
  if (pts.size() >= 3) {
    const RatioFit fit = fit_ratio(pts, sqrt_n_log_k, SliceAxis::N);
    res.tables.push_back(fit_table("as-lower_fit", fit, c.seed, "exact"));
    res.tables.push_back(slice_table("as-lower_slices", fit, "n"));
  }
  return res;
}

// ---------------------------------------------------------------------------
// ns-scaling

ExperimentResult run_ns_scaling(const ExperimentConfig& c) {
  const bool exact = c.samples == 0;
  if (exact)
    for (unsigned n : c.n) require_exact(n, kMaxNoiseEnumVars, "ns-scaling (exact mode, samples = 0)");
  for (auto k : c.k)
    if (k < 2) throw ConfigError("ns-scaling needs k >= 2 (the model uses ln k)");
  for (const auto& f : c.families)
    if (f == "unate" || f == "parity") throw ConfigError("ns-scaling streams halfspace families only, not '" + f + "'");

  struct Item {
    std::string family;
    unsigned n;
    std::uint64_t k, trial, seed;
    std::vector<MonteCarloEstimate> est;
  };
  std::vector<Item> items;
  for (const auto& f : c.families)
    for (unsigned n : c.n)
      for (auto k : c.k)
        for (std::uint64_t t = 0; t < c.trials; ++t)
          items.push_back({f, n, k, t, seed_for(c.seed, {family_index(f), n, k, t}), {}});

  auto work = [&](std::size_t i) {
    auto& it = items[i];
    const Instance inst = make_instance(it.family, it.n, it.k, it.seed);
    std::optional<DegreeWeightProfile> profile;
    if (exact) profile = degree_profile(wht(table_of(inst, kMaxNoiseEnumVars)));
    for (std::size_t e = 0; e < c.eps.size(); ++e) {
      const unsigned m = noise_bins(c.eps[e]);
      if (exact) {
        const Rational ns = ns_from_profile(*profile, make_rational(1, m));
        it.est.push_back({to_double(ns), 0, 0, it.seed, McMode::FullScan});
      } else {
        it.est.push_back(noise_sensitivity_mc(*inst.spec, 1.0 / m, c.samples, derive_seed(it.seed, 1000 + e)));
      }
    }
  };
  if (exact) {
    parallel_for(items.size(), work);
  } else {
    for (std::size_t i = 0; i < items.size(); ++i) work(i);
  }

  CsvTable main{"ns-scaling",
                {"n", "k", "seed", "mode", "family", "trial", "eps_requested", "eps", "bins", "samples", "ns",
                 "std_error", "ratio"},
                {}};
  std::map<std::tuple<unsigned, std::uint64_t, double>, double> envelope;
  for (const auto& it : items) {
    for (std::size_t e = 0; e < c.eps.size(); ++e) {
      const unsigned m = noise_bins(c.eps[e]);
      const double eps = 1.0 / m;
      const auto& est = it.est[e];
      const double scale = std::sqrt(eps * std::log(static_cast<double>(it.k)));
      main.rows.push_back({num(it.n), num(it.k), num(it.seed), exact ? "exact" : "mc", it.family, num(it.trial),
                           num(c.eps[e]), num(eps), num(m), num(est.samples), num(est.estimate), num(est.std_error),
                           num(est.estimate / scale)});
      auto& slot = envelope[{it.n, it.k, eps}];
      slot = std::max(slot, est.estimate);
    }
  }
  ExperimentResult res;
  res.tables.push_back(std::move(main));
  std::vector<FitPoint> pts;
  for (const auto& [key, v] : envelope) pts.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v, false});
  if (pts.size() >= 3) {
    const RatioFit fit = fit_ratio(pts, sqrt_eps_log_k, SliceAxis::X);
    res.tables.push_back(fit_table("ns-scaling_fit", fit, c.seed, exact ? "exact" : "mc"));
    res.tables.push_back(slice_table("ns-scaling_slices", fit, "eps"));
  }
  return res;
}

// ---------------------------------------------------------------------------
// claim-audit

ExperimentResult run_claim_audit(const ExperimentConfig& c) {
  for (unsigned n : c.n) require_exact(n, kMaxNoiseEnumVars, "claim-audit");
  for (auto k : c.k)
    if (k < 1) throw ConfigError("claim-audit needs k >= 1");

  struct Item {
    unsigned n;
    std::uint64_t k, trial, seed;
    std::string source;
    std::uint64_t pairs = 0, violations = 0;
    TelescopingLedger ledger;
  };
  std::vector<Item> items;
  for (unsigned n : c.n)
    for (auto k : c.k)
      for (std::uint64_t t = 0; t < c.trials; ++t)
        items.push_back({n, k, t, seed_for(c.seed, {n, k, t}), t % 2 ? "halfspace" : "subcube", 0, 0, {}});

  parallel_for(items.size(), [&](std::size_t i) {
    auto& it = items[i];
    std::vector<TruthTable> terms;
    if (it.source == "subcube") {
      terms = random_unate_terms(it.n, it.k, it.seed);
    } else {
      const CompositeSpec spec = random_intersection(it.n, it.k, it.seed);
      for (const auto& t : spec.terms()) terms.push_back(truth_table(t));
    }
    TruthTable prev = TruthTable::constant(it.n, false);
    for (const auto& term : terms) {
      const Orientation o = orientation(term);
      std::uint64_t z = 0;
      for (unsigned j = 0; j < it.n; ++j)
        if (o.directions[j] == Direction::Decreasing) z |= 1ULL << j;
      it.violations += claim_pointwise_check(xor_permute(prev, z), xor_permute(term, z)).size();
      it.pairs += term.size() * it.n;
      prev |= term;
    }
    it.ledger = telescoping_audit(terms);
  });

  CsvTable main{"claim-audit",
                {"n", "k", "seed", "mode", "trial", "source", "pairs_checked", "violations", "ledger_holds",
                 "as_total", "corr_total"},
                {}};
  for (const auto& it : items)
    main.rows.push_back({num(it.n), num(it.k), num(it.seed), "exact", num(it.trial), it.source, num(it.pairs),
                         num(it.violations), flag(it.ledger.holds()), rational_cell(it.ledger.as_total),
                         rational_cell(it.ledger.corr_total)});
  ExperimentResult res;
  res.tables.push_back(std::move(main));
  return res;
}

// ---------------------------------------------------------------------------
// binning-check

ExperimentResult run_binning_check(const ExperimentConfig& c) {
  for (unsigned n : c.n) require_exact(n, 6, "binning-check");

  struct Item {
    unsigned n;
    std::uint64_t k, trial, seed;
    unsigned m;
    Rational tv, ns, binned;
  };
  std::vector<Item> items;
  for (unsigned n : c.n)
    for (unsigned m = 1; m <= n; ++m) items.push_back({n, 0, 0, c.seed, m, {}, {}, {}});
  for (unsigned n : c.n)
    for (auto k : c.k) {
      if (k == 0) continue;
      for (std::uint64_t t = 0; t < c.trials; ++t)
        for (unsigned m = 2; m <= n; ++m) items.push_back({n, k, t, seed_for(c.seed, {n, k, t}), m, {}, {}, {}});
    }

  parallel_for(items.size(), [&](std::size_t i) {
    auto& it = items[i];
    if (it.k == 0) {
      it.tv = binning_distribution_check(it.n, it.m);
      return;
    }
    const CompositeSpec spec = random_intersection(it.n, it.k, it.seed);
    it.ns = ns_from_spectrum(wht(truth_table(spec)), make_rational(1, it.m));
    it.binned = restricted_sensitivity_mean(spec, it.m);
  });

  CsvTable main{"binning-check", {"n", "k", "seed", "mode", "trial", "m", "tv", "ns", "binned", "match"}, {}};
  for (const auto& it : items) {
    if (it.k == 0)
      main.rows.push_back({num(it.n), "0", num(it.seed), "exact", "0", num(it.m), rational_cell(it.tv), "", "",
                           flag(it.tv == 0)});
    else
      main.rows.push_back({num(it.n), num(it.k), num(it.seed), "exact", num(it.trial), num(it.m), "",
                           rational_cell(it.ns), rational_cell(it.binned), flag(it.ns == it.binned)});
  }
  ExperimentResult res;
  res.tables.push_back(std::move(main));
  return res;
}

// ---------------------------------------------------------------------------
// fourier-tail

ExperimentResult run_fourier_tail(const ExperimentConfig& c) {
  for (unsigned n : c.n) require_exact(n, kMaxSpectrumVars, "fourier-tail");
  for (auto k : c.k)
    if (k < 2) throw ConfigError("fourier-tail needs k >= 2 (the degree uses ln k)");

  struct Item {
    std::string family;
    unsigned n;
    std::uint64_t k, trial, seed;
    std::optional<DegreeWeightProfile> profile;
  };
  std::vector<Item> items;
  for (const auto& f : c.families)
    for (unsigned n : c.n)
      for (auto k : c.k)
        for (std::uint64_t t = 0; t < (f == "parity" ? 1 : c.trials); ++t)
          items.push_back({f, n, k, t, seed_for(c.seed, {family_index(f), n, k, t}), {}});

  parallel_for(items.size(), [&](std::size_t i) {
    auto& it = items[i];
    it.profile = degree_profile(wht(table_of(make_instance(it.family, it.n, it.k, it.seed), kMaxSpectrumVars)));
  });

  CsvTable main{"fourier-tail",
                {"n", "k", "seed", "mode", "family", "trial", "eps", "C", "d", "capped", "tail", "below_eps",
                 "d_min", "c_min"},
                {}};
  std::map<double, std::pair<double, std::uint64_t>> per_eps;
  for (const auto& it : items) {
    const double lk = std::log(static_cast<double>(it.k));
    for (double eps : c.eps) {
      const Rational eps_q(eps);
      const double raw = std::ceil(c.C * lk / (eps * eps));
      const unsigned d = degree_for(it.k, eps, c.C, it.n);
      const Rational tail = tail_weight(*it.profile, d);
      unsigned d_min = 0;
      while (d_min < it.n && !(tail_weight(*it.profile, d_min) < eps_q)) ++d_min;
      const double c_min = d_min * eps * eps / lk;
      main.rows.push_back({num(it.n), num(it.k), num(it.seed), "exact", it.family, num(it.trial), num(eps), num(c.C),
                           num(d), flag(raw > it.n), num(to_double(tail)), flag(tail < eps_q), num(d_min),
                           num(c_min)});
      if (it.family != "parity") {
        auto& slot = per_eps[eps];
        slot.first = std::max(slot.first, c_min);
        ++slot.second;
      }
    }
  }
  CsvTable summary{"fourier-tail_c", {"eps", "instances", "c_fit"}, {}};
  double overall = 0;
  std::uint64_t count = 0;
  for (auto it = per_eps.rbegin(); it != per_eps.rend(); ++it) {
    summary.rows.push_back({num(it->first), num(it->second.second), num(it->second.first)});
    overall = std::max(overall, it->second.first);
    count += it->second.second;
  }
  summary.rows.push_back({"all", num(count), num(overall)});

  ExperimentResult res;
  res.tables.push_back(std::move(main));
  res.tables.push_back(std::move(summary));
  return res;
}

// ---------------------------------------------------------------------------
// learn

ExperimentResult run_learn(const ExperimentConfig& c) {
  for (unsigned n : c.n) require_exact(n, 24, "learn");

  struct Item {
    std::string family;
    unsigned n;
    std::uint64_t k, trial, seed;
    double eps;
    LearnReport report;
  };
  std::vector<Item> items;
  for (const auto& f : c.families)
    for (unsigned n : c.n)
      for (auto k : c.k)
        for (std::uint64_t t = 0; t < c.trials; ++t)
          for (double eps : c.eps) items.push_back({f, n, k, t, seed_for(c.seed, {family_index(f), n, k, t}), eps, {}});

  parallel_for(items.size(), [&](std::size_t i) {
    auto& it = items[i];
    const TruthTable target = table_of(make_instance(it.family, it.n, it.k, it.seed), 24);
    LearnOptions opt;
    opt.C = c.C;
    opt.full_cube = c.samples == 0;
    opt.samples = c.samples;
    opt.seed = derive_seed(it.seed, 1);
    it.report = agnostic_learn([&](std::uint64_t x) { return target.get(x); }, it.n, it.k, it.eps, opt).second;
  });

  CsvTable main{"learn",
                {"n", "k", "seed", "mode", "family", "trial", "eps", "C", "d", "features", "samples",
                 "training_loss", "training_error", "holdout_error", "cube_error"},
                {}};
  for (const auto& it : items) {
    const auto& r = it.report;
    main.rows.push_back({num(it.n), num(it.k), num(it.seed), c.samples == 0 ? "exact" : "mc", it.family,
                         num(it.trial), num(it.eps), num(c.C), num(r.d), num(r.features), num(r.samples),
                         num(r.training_loss), num(r.training_error), num(r.holdout_error), num(r.cube_error)});
  }
  ExperimentResult res;
  res.tables.push_back(std::move(main));
  return res;
}

// ---------------------------------------------------------------------------
// Plots

std::vector<SvgSeries> ratio_series(const CsvTable& fit, bool x_is_eps) {
  std::map<std::pair<bool, std::uint64_t>, SvgSeries> by_k;
  for (std::size_t r = 0; r < fit.rows.size(); ++r) {
    const bool control = fit.rows[r][fit.column("control")] == "1";
    const auto k = static_cast<std::uint64_t>(fit.number(r, "k"));
    auto& s = by_k[{control, k}];
    s.label = (control ? "control k=" : "k=") + std::to_string(k);
    s.lines = !control;
    const double x = x_is_eps ? std::log2(fit.number(r, "x")) : fit.number(r, "n");
    s.points.emplace_back(x, fit.number(r, "ratio"));
  }
  std::vector<SvgSeries> out;
  for (auto& [_, s] : by_k) out.push_back(std::move(s));
  return out;
}

}  // namespace

ExperimentResult compute(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::AsUpper:
      return run_as_upper(config);
    case ExperimentKind::AsLower:
      return run_as_lower(config);
    case ExperimentKind::NsScaling:
      return run_ns_scaling(config);
    case ExperimentKind::ClaimAudit:
      return run_claim_audit(config);
    case ExperimentKind::BinningCheck:
      return run_binning_check(config);
    case ExperimentKind::FourierTail:
      return run_fourier_tail(config);
    case ExperimentKind::Learn:
      return run_learn(config);
  }
  throw ConfigError("unknown experiment kind");
}

std::vector<std::filesystem::path> run(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const ExperimentResult result = compute(config);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> files;
  for (const auto& t : result.tables) {
    const auto path = out_dir / (t.name + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    t.write(out, config.raw);
    files.push_back(path);
  }
  if (config.plots) {
    const std::string kind(to_string(config.kind));
    for (const auto& t : result.tables) {
      if (t.name != kind + "_fit") continue;
      const bool eps_axis = config.kind == ExperimentKind::NsScaling;
      const auto path = out_dir / (kind + ".svg");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw ConfigError("cannot write " + path.string());
      write_svg_plot(out, kind + " ratio", eps_axis ? "log2 eps" : "n",
                     eps_axis ? "ns / sqrt(eps ln k)" : "as / sqrt(n ln k)", ratio_series(t, eps_axis));
      files.push_back(path);
    }
  }
  return files;
}

void write_svg_plot(std::ostream& out, std::string_view title, std::string_view x_label, std::string_view y_label,
                    const std::vector<SvgSeries>& series) {
  constexpr double W = 720, H = 480, L = 70, R = 150, T = 40, B = 50;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  double x0 = 1e300, x1 = -1e300, y0 = 0, y1 = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (x0 > x1) x0 = 0, x1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  y1 *= 1.05;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5, yv = y0 + (y1 - y0) * i / 5;
    out << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << num(std::round(xv * 100) / 100) << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << num(std::round(yv * 100) / 100) << "</text>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << py(yv) << "\" x2=\"" << W - R << "\" y2=\"" << py(yv) << "\" stroke=\"#eee\"/>\n";
  }
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (T + H - B) / 2 << ")\">" << y_label << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = palette[s % std::size(palette)];
    const auto& pts = series[s].points;
    if (series[s].lines && pts.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
      for (auto [x, y] : pts) out << px(x) << ',' << py(y) << ' ';
      out << "\"/>\n";
    }
    for (auto [x, y] : pts)
      out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
    out << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 14 * s << "\" fill=\"" << colour << "\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace halfsens

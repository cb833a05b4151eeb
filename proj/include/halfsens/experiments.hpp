#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace halfsens {

enum class ExperimentKind { AsUpper, AsLower, NsScaling, ClaimAudit, BinningCheck, FourierTail, Learn };

ExperimentKind parse_experiment_kind(std::string_view name);
std::string_view to_string(ExperimentKind kind) noexcept;

/// Everything a run depends on. Unset grids fall back to per-kind defaults
/// in config_from_json; `raw` is the normalized document echoed into
/// every output file.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::AsUpper;
  std::vector<unsigned> n;
  std::vector<std::uint64_t> k;
  std::vector<double> eps;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;          ///< Monte Carlo samples (ns-scaling), learner samples
  std::vector<std::string> families;  ///< instance families, kind specific
  double C = 4.0;                     ///< degree constant (fourier-tail, learn)
  bool plots = true;
  nlohmann::json raw;
};

/// Throws ConfigError on unknown keys, bad types or empty grids.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// A CSV with a fixed column order per kind. All cells are preformatted
/// so two runs compare byte for byte.
struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view col) const;
  void write(std::ostream& out, const nlohmann::json& config) const;
};

/// The tables of one run: the main per-instance table first, then any
/// summaries (fits, audits).
struct ExperimentResult {
  std::vector<CsvTable> tables;

  const CsvTable& table(std::string_view name) const;
};

/// Computes every table in grid order. Work items run on the worker pool
/// but results are assembled in a fixed order, so the output does not
/// depend on the worker count.
ExperimentResult compute(const ExperimentConfig& config);

/// compute(), then writes <table>.csv (and <kind>.svg when plots are on)
/// under out_dir. Returns the files written.
std::vector<std::filesystem::path> run(const ExperimentConfig& config, const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// Ratio fits

struct FitPoint {
  unsigned n = 0;
  std::uint64_t k = 0;
  double x = 0;  ///< extra grid coordinate (eps), 0 when unused
  double value = 0;
  bool control = false;  ///< evaluated against the fit but not fitted
};

/// Model scale g with value ~ a * g(point).
using ScaleModel = std::function<double(const FitPoint&)>;

/// sqrt(n ln k)
double sqrt_n_log_k(const FitPoint& p);
/// sqrt(eps ln k), eps taken from FitPoint::x
double sqrt_eps_log_k(const FitPoint& p);

enum class SliceAxis { N, K, X };

struct FitResidual {
  FitPoint point;
  double scale = 0;
  double ratio = 0;     ///< value / scale
  double relative = 0;  ///< ratio / a
  bool flagged = false;
};

struct SliceConstant {
  double key = 0;
  double a = 0;
  std::size_t points = 0;
};

struct RatioFit {
  double a = 0;  ///< least squares over non-control points
  double tolerance = 0.25;
  std::vector<FitResidual> residuals;
  std::vector<SliceConstant> slices;  ///< a refitted on each slice of the axis
  double point_drift = 0;             ///< max |relative - 1| over fitted points
  double slice_drift = 0;             ///< max |a_slice / a - 1|

  std::size_t flagged_count(bool control) const;
};

/// Least-squares a minimizing sum (value - a g)^2 over non-control points.
/// A point is flagged when its ratio is off the fit by more than
/// `tolerance` (relative). Throws DomainError when fewer than 3 distinct
/// fitted grid points remain or a scale is not positive.
RatioFit fit_ratio(const std::vector<FitPoint>& points, const ScaleModel& model = sqrt_n_log_k,
                   SliceAxis axis = SliceAxis::N, double tolerance = 0.25);

// ---------------------------------------------------------------------------
// Plots

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool lines = true;
};

/// Minimal scatter/line chart: axes, ticks, one colour per series.
void write_svg_plot(std::ostream& out, std::string_view title, std::string_view x_label, std::string_view y_label,
                    const std::vector<SvgSeries>& series);

}  // namespace halfsens

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "halfsens/hypercube.hpp"
#include "halfsens/random.hpp"

namespace halfsens {

struct LabeledSample {
  std::uint64_t x = 0;  ///< point as a mask (bit i set <=> x_i = +1)
  int label = 0;        ///< 0 or 1
};

/// d = ceil(C ln(k) / eps^2), capped at n. Requires k >= 2, eps in (0,1), C > 0.
unsigned degree_for(std::uint64_t k, double eps, double C, unsigned n);

/// Masks S with |S| <= d in increasing mask value; the feature order.
std::vector<std::uint64_t> low_degree_masks(unsigned n, unsigned d);

/// sum_{j <= d} C(n, j).
std::uint64_t feature_count(unsigned n, unsigned d);

/// chi_S(x) for every |S| <= d, in low_degree_masks order.
std::vector<int> parity_features(const HypercubePoint& x, unsigned d);

/// p(x) = sum_S c_S chi_S(x) over |S| <= d, plus solver metadata.
struct LowDegreePolynomial {
  unsigned n = 0;
  unsigned d = 0;
  std::vector<std::uint64_t> masks;
  std::vector<double> coeffs;
  std::string method;
  double tolerance = 0;
  double loss = 0;         ///< mean |p(x_j) - label_j| on the fit set
  double lower_bound = 0;  ///< certified lower bound on the optimal mean loss
  std::uint64_t iterations = 0;

  double operator()(std::uint64_t x) const;
  double gap() const { return loss - lower_bound; }
};

struct L1Options {
  double tolerance = 1e-7;  ///< target duality gap on the mean loss
  std::uint64_t max_iterations = 200000;
  std::uint64_t max_features = 200000;
  std::uint64_t max_dense_entries = 25000000;  ///< samples x features, dense path
};

/// Minimizes mean_j |p(x_j) - label_j| over degree <= d polynomials by
/// ADMM, stopping once the primal-dual gap drops below the tolerance.
/// When the samples are exactly the 2^n cube points, the design matrix is
/// applied with fast Walsh-Hadamard transforms; otherwise a dense QR is used.
LowDegreePolynomial l1_regress(std::span<const LabeledSample> samples, unsigned n, unsigned d,
                               const L1Options& options = {});

/// Rounds at 1/2: h(x) = [p(x) >= 1/2].
struct Hypothesis {
  LowDegreePolynomial poly;
  bool operator()(std::uint64_t x) const { return poly(x) >= 0.5; }
};

struct LearnOptions {
  double C = 4.0;
  /// 0 selects feature_count * ceil(8 / eps^2).
  std::uint64_t samples = 0;
  bool full_cube = false;
  std::uint64_t holdout = 10000;
  std::uint64_t seed = 0;
  L1Options solver;
};

struct LearnReport {
  unsigned d = 0;
  std::uint64_t features = 0;
  std::uint64_t samples = 0;
  double training_loss = 0;
  double training_error = 0;
  double holdout_error = 0;  ///< on fresh uniform samples
  double cube_error = 0;     ///< exact Pr_x[h(x) != target(x)], n <= 24
};

using Target = std::function<bool(std::uint64_t)>;

/// Uniform-x examples labelled by `target`, which may be any function of
/// x; the labels need not come from the concept class.
std::vector<LabeledSample> draw_samples(const Target& target, unsigned n, std::uint64_t count, CounterRng& rng);
std::vector<LabeledSample> cube_samples(const Target& target, unsigned n);

/// Degree from degree_for (k < 2 treated as 2), fit by l1_regress, report
/// training and held-out disagreement.
std::pair<Hypothesis, LearnReport> agnostic_learn(const Target& target, unsigned n, std::uint64_t k, double eps,
                                                  const LearnOptions& options = {});

nlohmann::json model_to_json(const LowDegreePolynomial& p);
LowDegreePolynomial model_from_json(const nlohmann::json& doc);

/// "x,label" with x the point mask.
void write_dataset_csv(std::ostream& out, std::span<const LabeledSample> samples);
std::vector<LabeledSample> read_dataset_csv(std::istream& in);

}  // namespace halfsens

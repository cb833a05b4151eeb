#include "halfsens/learner.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "halfsens/error.hpp"
#include "halfsens/fourier.hpp"

namespace halfsens {

unsigned degree_for(std::uint64_t k, double eps, double C, unsigned n) {
  if (k < 2) throw DomainError("degree_for needs k >= 2");
  if (!(eps > 0 && eps <= 1)) throw DomainError("degree_for needs eps in (0, 1]");
  if (!(C > 0)) throw DomainError("degree_for needs C > 0");
  const double raw = std::ceil(C * std::log(static_cast<double>(k)) / (eps * eps));
  return raw >= n ? n : static_cast<unsigned>(raw);
}

std::vector<std::uint64_t> low_degree_masks(unsigned n, unsigned d) {
  if (n > kMaxTableVars) throw ResourceCapError("feature masks need n <= 30");
  if (d > n) throw DomainError("degree exceeds n");
  std::vector<std::uint64_t> masks;
  for (std::uint64_t s = 0; s < (1ULL << n); ++s)
    if (static_cast<unsigned>(std::popcount(s)) <= d) masks.push_back(s);
  return masks;
}

std::uint64_t feature_count(unsigned n, unsigned d) {
  std::uint64_t total = 0, binom = 1;
  for (unsigned j = 0; j <= std::min(d, n); ++j) {
    total += binom;
    binom = binom * (n - j) / (j + 1);
  }
  return total;
}

namespace {

inline int character(std::uint64_t mask, std::uint64_t x) { return (std::popcount(mask & ~x) & 1) ? -1 : 1; }

}  // namespace

std::vector<int> parity_features(const HypercubePoint& x, unsigned d) {
  const auto masks = low_degree_masks(x.num_vars(), d);
  std::vector<int> out;
  out.reserve(masks.size());
  for (auto s : masks) out.push_back(character(s, x.bits()));
  return out;
}

double LowDegreePolynomial::operator()(std::uint64_t x) const {
  double total = 0;
  for (std::size_t j = 0; j < masks.size(); ++j) total += coeffs[j] * character(masks[j], x);
  return total;
}

namespace {

using Eigen::VectorXd;

/// The design matrix Phi (rows = samples, columns = characters) as an operator.
class Design {
 public:
  virtual ~Design() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual VectorXd apply(const VectorXd& c) const = 0;
  /// argmin_c ||Phi c - v||
  virtual VectorXd least_squares(const VectorXd& v) const = 0;
  VectorXd project_null(const VectorXd& v) const { return v - apply(least_squares(v)); }
};

class DenseDesign final : public Design {
 public:
  DenseDesign(std::span<const LabeledSample> samples, std::span<const std::uint64_t> masks)
      : phi_(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(masks.size())) {
    for (std::size_t j = 0; j < samples.size(); ++j)
      for (std::size_t f = 0; f < masks.size(); ++f)
        phi_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(f)) = character(masks[f], samples[j].x);
    qr_.compute(phi_);
  }
  std::size_t rows() const override { return static_cast<std::size_t>(phi_.rows()); }
  std::size_t cols() const override { return static_cast<std::size_t>(phi_.cols()); }
  VectorXd apply(const VectorXd& c) const override { return phi_ * c; }
  VectorXd least_squares(const VectorXd& v) const override { return qr_.solve(v); }

 private:
  Eigen::MatrixXd phi_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

/// Samples are the whole cube in index order; Phi^T Phi = 2^n I and both
/// Phi and Phi^T are Hadamard transforms restricted to the masks.
class CubeDesign final : public Design {
 public:
  CubeDesign(unsigned n, std::span<const std::uint64_t> masks) : n_(n), masks_(masks.begin(), masks.end()) {}
  std::size_t rows() const override { return std::size_t{1} << n_; }
  std::size_t cols() const override { return masks_.size(); }
  VectorXd apply(const VectorXd& c) const override {
    std::vector<double> buf(rows(), 0.0);
    for (std::size_t f = 0; f < masks_.size(); ++f)
      buf[masks_[f]] = (std::popcount(masks_[f]) & 1) ? -c[static_cast<Eigen::Index>(f)] : c[static_cast<Eigen::Index>(f)];
    hadamard_inplace(std::span<double>(buf));
    return Eigen::Map<VectorXd>(buf.data(), static_cast<Eigen::Index>(buf.size()));
  }
  VectorXd least_squares(const VectorXd& v) const override {
    std::vector<double> buf(v.data(), v.data() + v.size());
    hadamard_inplace(std::span<double>(buf));
    VectorXd c(static_cast<Eigen::Index>(masks_.size()));
    const double scale = std::ldexp(1.0, -static_cast<int>(n_));
    for (std::size_t f = 0; f < masks_.size(); ++f) {
      const double h = buf[masks_[f]] * scale;
      c[static_cast<Eigen::Index>(f)] = (std::popcount(masks_[f]) & 1) ? -h : h;
    }
    return c;
  }

 private:
  unsigned n_;
  std::vector<std::uint64_t> masks_;
};

bool is_full_cube(std::span<const LabeledSample> samples, unsigned n) {
  if (n > 24 || samples.size() != (std::size_t{1} << n)) return false;
  std::vector<bool> seen(samples.size(), false);
  for (const auto& s : samples) {
    if (s.x >= samples.size() || seen[s.x]) return false;
    seen[s.x] = true;
  }
  return true;
}

VectorXd soft_threshold(const VectorXd& v, double t) {
  return v.unaryExpr([t](double a) { return a > t ? a - t : (a < -t ? a + t : 0.0); });
}

}  // namespace

LowDegreePolynomial l1_regress(std::span<const LabeledSample> samples, unsigned n, unsigned d,
                               const L1Options& opt) {
  if (samples.empty()) throw DomainError("l1_regress needs at least one sample");
  if (d > n) throw DomainError("degree exceeds n");
  const std::uint64_t features = feature_count(n, d);
  if (features > opt.max_features)
    throw ResourceCapError("l1_regress: " + std::to_string(features) + " features exceed the cap of " +
                           std::to_string(opt.max_features));
  const auto masks = low_degree_masks(n, d);

  std::unique_ptr<Design> design;
  VectorXd y(static_cast<Eigen::Index>(samples.size()));
  std::string method;
  if (is_full_cube(samples, n)) {
    design = std::make_unique<CubeDesign>(n, masks);
    for (const auto& s : samples) y[static_cast<Eigen::Index>(s.x)] = s.label;
    method = "admm-l1/hadamard";
  } else {
    if (features * samples.size() > opt.max_dense_entries)
      throw ResourceCapError("l1_regress: design of " + std::to_string(samples.size()) + " x " +
                             std::to_string(features) + " exceeds the dense cap");
    design = std::make_unique<DenseDesign>(samples, masks);
    for (std::size_t j = 0; j < samples.size(); ++j) y[static_cast<Eigen::Index>(j)] = samples[j].label;
    method = "admm-l1/dense-qr";
  }

  const auto rows = static_cast<double>(design->rows());
  const Eigen::Index m = static_cast<Eigen::Index>(design->rows());
  double rho = 1.0;
  VectorXd r = VectorXd::Zero(m), u = VectorXd::Zero(m);
  VectorXd c = design->least_squares(y);
  VectorXd pc = design->apply(c);

  LowDegreePolynomial best;
  best.loss = (pc - y).lpNorm<1>() / rows;
  best.coeffs.assign(c.data(), c.data() + c.size());
  double best_lower = 0;  // labels are >= 0 ... any lower bound; 0 is always valid
  std::uint64_t it = 0;
  for (; it < opt.max_iterations; ++it) {
    c = design->least_squares(y + r - u);
    pc = design->apply(c);
    const VectorXd r_next = soft_threshold(pc - y + u, 1.0 / rho);
    const VectorXd primal = pc - y - r_next;
    u += primal;
    const double primal_norm = primal.norm();
    const double dual_norm = rho * (r_next - r).norm();
    r = r_next;

    if (it % 10 == 9) {
      const double loss = (pc - y).lpNorm<1>() / rows;
      if (loss < best.loss) {
        best.loss = loss;
        best.coeffs.assign(c.data(), c.data() + c.size());
      }
      // lambda = rho u has |lambda| <= 1; project onto ker Phi^T and rescale
      // to get a feasible dual point, whose value bounds the optimum.
      VectorXd lambda = design->project_null(rho * u);
      const double peak = lambda.lpNorm<Eigen::Infinity>();
      if (peak > 1.0) lambda /= peak;
      best_lower = std::max(best_lower, -y.dot(lambda) / rows);
      if (best.loss - best_lower <= opt.tolerance) {
        ++it;
        break;
      }
    }
    if (it % 50 == 49) {
      if (primal_norm > 10 * dual_norm) {
        rho *= 2;
        u /= 2;
      } else if (dual_norm > 10 * primal_norm) {
        rho /= 2;
        u *= 2;
      }
    }
  }
  best.n = n;
  best.d = d;
  best.masks = masks;
  best.method = method;
  best.tolerance = opt.tolerance;
  best.lower_bound = best_lower;
  best.iterations = it;
  return best;
}

std::vector<LabeledSample> draw_samples(const Target& target, unsigned n, std::uint64_t count, CounterRng& rng) {
  if (n > kMaxTableVars) throw DimensionError("learner points need n <= 30");
  std::vector<LabeledSample> out(count);
  for (auto& s : out) {
    s.x = rng() & bits::low_mask(n);
    s.label = target(s.x) ? 1 : 0;
  }
  return out;
}

std::vector<LabeledSample> cube_samples(const Target& target, unsigned n) {
  if (n > 24) throw ResourceCapError("full-cube training needs n <= 24");
  std::vector<LabeledSample> out(std::size_t{1} << n);
  for (std::uint64_t x = 0; x < out.size(); ++x) out[x] = {x, target(x) ? 1 : 0};
  return out;
}

std::pair<Hypothesis, LearnReport> agnostic_learn(const Target& target, unsigned n, std::uint64_t k, double eps,
                                                  const LearnOptions& opt) {
  LearnReport report;
  report.d = degree_for(std::max<std::uint64_t>(k, 2), eps, opt.C, n);
  report.features = feature_count(n, report.d);

  std::vector<LabeledSample> train;
  if (opt.full_cube) {
    train = cube_samples(target, n);
  } else {
    const auto per_feature = static_cast<std::uint64_t>(std::ceil(8.0 / (eps * eps)));
    const std::uint64_t count = opt.samples ? opt.samples : report.features * per_feature;
    CounterRng rng(derive_seed(opt.seed, 0));
    train = draw_samples(target, n, count, rng);
  }
  report.samples = train.size();

  Hypothesis h{l1_regress(train, n, report.d, opt.solver)};
  report.training_loss = h.poly.loss;
  std::uint64_t wrong = 0;
  for (const auto& s : train) wrong += h(s.x) != (s.label == 1);
  report.training_error = static_cast<double>(wrong) / static_cast<double>(train.size());

  if (opt.holdout > 0) {
    CounterRng rng(derive_seed(opt.seed, 1));
    const auto holdout = draw_samples(target, n, opt.holdout, rng);
    wrong = 0;
    for (const auto& s : holdout) wrong += h(s.x) != (s.label == 1);
    report.holdout_error = static_cast<double>(wrong) / static_cast<double>(holdout.size());
  }
  if (n <= 24) {
    wrong = 0;
    for (std::uint64_t x = 0; x < (1ULL << n); ++x) wrong += h(x) != target(x);
    report.cube_error = std::ldexp(static_cast<double>(wrong), -static_cast<int>(n));
  }
  return {std::move(h), report};
}

nlohmann::json model_to_json(const LowDegreePolynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t j = 0; j < p.masks.size(); ++j) terms.push_back({p.masks[j], p.coeffs[j]});
  return {{"n", p.n},
          {"d", p.d},
          {"method", p.method},
          {"tolerance", p.tolerance},
          {"loss", p.loss},
          {"lower_bound", p.lower_bound},
          {"iterations", p.iterations},
          {"terms", std::move(terms)}};
}

LowDegreePolynomial model_from_json(const nlohmann::json& doc) {
  try {
    LowDegreePolynomial p;
    p.n = doc.at("n").get<unsigned>();
    p.d = doc.at("d").get<unsigned>();
    p.method = doc.value("method", std::string{});
    p.tolerance = doc.value("tolerance", 0.0);
    p.loss = doc.value("loss", 0.0);
    p.lower_bound = doc.value("lower_bound", 0.0);
    p.iterations = doc.value("iterations", std::uint64_t{0});
    for (const auto& t : doc.at("terms")) {
      const auto mask = t.at(0).get<std::uint64_t>();
      if (static_cast<unsigned>(std::popcount(mask)) > p.d || (mask >> p.n) != 0)
        throw ConfigError("model term mask outside degree/dimension");
      p.masks.push_back(mask);
      p.coeffs.push_back(t.at(1).get<double>());
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model: ") + e.what());
  }
}

void write_dataset_csv(std::ostream& out, std::span<const LabeledSample> samples) {
  out << "x,label\n";
  for (const auto& s : samples) out << s.x << ',' << s.label << '\n';
}

std::vector<LabeledSample> read_dataset_csv(std::istream& in) {
  std::vector<LabeledSample> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  if (line.rfind("x,", 0) != 0) throw ConfigError("dataset must start with the header 'x,label'");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    LabeledSample s;
    char comma = 0;
    if (!(row >> s.x >> comma >> s.label) || comma != ',' || (s.label != 0 && s.label != 1))
      throw ConfigError("bad dataset row: " + line);
    out.push_back(s);
  }
  return out;
}

}  // namespace halfsens

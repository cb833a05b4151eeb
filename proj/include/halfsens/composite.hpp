#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "halfsens/hypercube.hpp"
#include "halfsens/ltf.hpp"
#include "halfsens/truth_table.hpp"

namespace halfsens {

enum class Combiner { And, Or };

using Term = std::variant<LinearThresholdFunction, TruthTable>;

/// AND / OR of k terms over a shared dimension. k = 0 gives the empty
/// conjunction (constant 1) or empty disjunction (constant 0).
class CompositeSpec {
 public:
  CompositeSpec(unsigned n, Combiner combiner, std::vector<Term> terms = {});

  unsigned num_vars() const noexcept { return n_; }
  Combiner combiner() const noexcept { return combiner_; }
  std::size_t num_terms() const noexcept { return terms_.size(); }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  void add_term(Term term);

  /// True if every term is a halfspace (streamable at any n).
  bool all_ltf() const noexcept;

  bool operator()(const HypercubePoint& x) const;
  bool operator()(std::span<const std::int8_t> x) const;

 private:
  unsigned n_;
  Combiner combiner_;
  std::vector<Term> terms_;
};

unsigned num_vars(const Term& t);

bool eval(const LinearThresholdFunction& f, const HypercubePoint& x);
bool eval(const TruthTable& f, const HypercubePoint& x);
bool eval(const CompositeSpec& f, const HypercubePoint& x);

/// De Morgan dual: complemented terms under the opposite combiner.
CompositeSpec complement(const CompositeSpec& spec);

/// Exhaustive table of a term or composite; n must match the spec and
/// stay within max_vars (the memory budget).
TruthTable truth_table(const Term& t);
TruthTable truth_table(const CompositeSpec& spec, unsigned max_vars = kMaxTableVars);
TruthTable truth_table(const CompositeSpec& spec, unsigned n, unsigned max_vars);

/// Incremental evaluator for sampling: caches one linear form (or table
/// index) per term for a loaded point, so flipping a few coordinates
/// costs O(k * flips) instead of O(k * n).
class StreamingEvaluator {
 public:
  explicit StreamingEvaluator(const CompositeSpec& spec);

  void load(std::span<const std::int8_t> x);
  bool value() const;
  /// f at the loaded point with the listed coordinates negated.
  bool value_with_flips(std::span<const std::uint32_t> flipped) const;

 private:
  const CompositeSpec* spec_;
  std::span<const std::int8_t> point_;
  std::vector<std::int64_t> state_;
};

}  // namespace halfsens

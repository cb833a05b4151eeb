#include "halfsens/composite.hpp"

#include <string>

namespace halfsens {

unsigned num_vars(const Term& t) {
  return std::visit([](const auto& f) { return f.num_vars(); }, t);
}

CompositeSpec::CompositeSpec(unsigned n, Combiner combiner, std::vector<Term> terms)
    : n_(n), combiner_(combiner) {
  if (n == 0) throw DimensionError("spec needs n >= 1");
  terms_.reserve(terms.size());
  for (auto& t : terms) add_term(std::move(t));
}

void CompositeSpec::add_term(Term term) {
  if (halfsens::num_vars(term) != n_)
    throw DimensionError("term has " + std::to_string(halfsens::num_vars(term)) + " variables, spec has " +
                         std::to_string(n_));
  terms_.push_back(std::move(term));
}

bool CompositeSpec::all_ltf() const noexcept {
  for (const auto& t : terms_)
    if (!std::holds_alternative<LinearThresholdFunction>(t)) return false;
  return true;
}

namespace {

bool term_at(const Term& t, const HypercubePoint& x) {
  return std::visit([&](const auto& f) { return f(x); }, t);
}

bool term_at(const Term& t, std::span<const std::int8_t> x) {
  if (const auto* f = std::get_if<LinearThresholdFunction>(&t)) return (*f)(x);
  const auto& table = std::get<TruthTable>(t);
  if (x.size() != table.num_vars()) throw DimensionError("point dimension does not match table");
  return table.get(to_index(x));
}

template <class Point>
bool combine_terms(const CompositeSpec& spec, const Point& x) {
  if (spec.combiner() == Combiner::And) {
    for (const auto& t : spec.terms())
      if (!term_at(t, x)) return false;
    return true;
  }
  for (const auto& t : spec.terms())
    if (term_at(t, x)) return true;
  return false;
}

}  // namespace

bool CompositeSpec::operator()(const HypercubePoint& x) const {
  if (x.num_vars() != n_) throw DimensionError("point dimension does not match spec");
  return combine_terms(*this, x);
}

bool CompositeSpec::operator()(std::span<const std::int8_t> x) const {
  if (x.size() != n_) throw DimensionError("point dimension does not match spec");
  return combine_terms(*this, x);
}

bool eval(const LinearThresholdFunction& f, const HypercubePoint& x) { return f(x); }
bool eval(const TruthTable& f, const HypercubePoint& x) { return f(x); }
bool eval(const CompositeSpec& f, const HypercubePoint& x) { return f(x); }

CompositeSpec complement(const CompositeSpec& spec) {
  CompositeSpec out(spec.num_vars(), spec.combiner() == Combiner::And ? Combiner::Or : Combiner::And);
  for (const auto& t : spec.terms()) {
    if (const auto* f = std::get_if<LinearThresholdFunction>(&t))
      out.add_term(complement(*f));
    else
      out.add_term(complement(std::get<TruthTable>(t)));
  }
  return out;
}

TruthTable truth_table(const Term& t) {
  if (const auto* f = std::get_if<LinearThresholdFunction>(&t)) return truth_table(*f);
  return std::get<TruthTable>(t);
}

TruthTable truth_table(const CompositeSpec& spec, unsigned max_vars) {
  return truth_table(spec, spec.num_vars(), max_vars);
}

TruthTable truth_table(const CompositeSpec& spec, unsigned n, unsigned max_vars) {
  if (n != spec.num_vars()) throw DimensionError("requested table dimension does not match spec");
  if (n > max_vars || n > kMaxTableVars)
    throw ResourceCapError("truth table for n = " + std::to_string(n) + " exceeds the budget of " +
                           std::to_string(std::min(max_vars, kMaxTableVars)) + " variables");
  const bool is_and = spec.combiner() == Combiner::And;
  TruthTable acc = TruthTable::constant(n, is_and);
  for (const auto& t : spec.terms()) {
    if (is_and)
      acc &= truth_table(t);
    else
      acc |= truth_table(t);
  }
  return acc;
}

StreamingEvaluator::StreamingEvaluator(const CompositeSpec& spec)
    : spec_(&spec), state_(spec.num_terms(), 0) {}

void StreamingEvaluator::load(std::span<const std::int8_t> x) {
  if (x.size() != spec_->num_vars()) throw DimensionError("point dimension does not match spec");
  point_ = x;
  const auto& terms = spec_->terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (const auto* f = std::get_if<LinearThresholdFunction>(&terms[t]))
      state_[t] = f->linear_form(x);
    else
      state_[t] = static_cast<std::int64_t>(to_index(x));
  }
}

bool StreamingEvaluator::value() const { return value_with_flips({}); }

bool StreamingEvaluator::value_with_flips(std::span<const std::uint32_t> flipped) const {
  const auto& terms = spec_->terms();
  const bool is_and = spec_->combiner() == Combiner::And;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    bool v;
    if (const auto* f = std::get_if<LinearThresholdFunction>(&terms[t])) {
      std::int64_t s = state_[t];
      for (auto i : flipped) s -= 2 * f->weights()[i] * point_[i];
      v = s > f->threshold();
    } else {
      auto idx = static_cast<std::uint64_t>(state_[t]);
      for (auto i : flipped) idx ^= 1ULL << i;
      v = std::get<TruthTable>(terms[t]).get(idx);
    }
    // short-circuit once the combiner's value is decided
    if (is_and && !v) return false;
    if (!is_and && v) return true;
  }
  return is_and;
}

}  // namespace halfsens

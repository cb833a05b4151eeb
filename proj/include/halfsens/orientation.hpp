#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "halfsens/ltf.hpp"
#include "halfsens/truth_table.hpp"

namespace halfsens {

enum class Direction { Increasing, Decreasing, Constant, Mixed };

std::string_view to_string(Direction d) noexcept;

struct Orientation {
  std::vector<Direction> directions;

  bool unate() const noexcept;
  /// sigma_i = -1 for Decreasing coordinates, +1 otherwise.
  std::vector<int> sign_vector() const;

  friend bool operator==(const Orientation&, const Orientation&) = default;
};

/// Per-coordinate monotonicity from the table: compares f(x^{i<-+1}) with
/// f(x^{i<--1}) over all co-assignments.
Orientation orientation(const TruthTable& t);

/// Orientation read off the weight signs.
Orientation orientation(const LinearThresholdFunction& f);

/// g(x) = f(sigma x) increasing in every coordinate; throws DomainError on
/// a non-unate input.
std::pair<TruthTable, std::vector<int>> normalize_increasing(const TruthTable& t,
                                                             const Orientation& o);

}  // namespace halfsens

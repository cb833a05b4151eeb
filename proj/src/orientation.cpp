#include "halfsens/orientation.hpp"

namespace halfsens {

std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Increasing: return "increasing";
    case Direction::Decreasing: return "decreasing";
    case Direction::Constant: return "constant";
    case Direction::Mixed: return "mixed";
  }
  return "?";
}

bool Orientation::unate() const noexcept {
  for (auto d : directions)
    if (d == Direction::Mixed) return false;
  return true;
}

std::vector<int> Orientation::sign_vector() const {
  std::vector<int> s(directions.size(), 1);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (directions[i] == Direction::Decreasing) s[i] = -1;
  return s;
}

Orientation orientation(const TruthTable& t) {
  Orientation o;
  o.directions.reserve(t.num_vars());
  for (unsigned i = 0; i < t.num_vars(); ++i) {
    // g(x) = f(x^i); on points with x_i = +1, f > g is an increase, f < g a decrease.
    const TruthTable g = flip_var(t, i);
    std::uint64_t up = 0, down = 0;
    auto fw = t.words();
    auto gw = g.words();
    for (std::size_t j = 0; j < fw.size(); ++j) {
      std::uint64_t plus_side;
      if (i < 6)
        plus_side = bits::kVarMask[i] & t.word_mask();
      else
        plus_side = (j >> (i - 6)) & 1u ? ~0ULL : 0ULL;
      up |= fw[j] & ~gw[j] & plus_side;
      down |= ~fw[j] & gw[j] & plus_side;
    }
    if (up && down)
      o.directions.push_back(Direction::Mixed);
    else if (up)
      o.directions.push_back(Direction::Increasing);
    else if (down)
      o.directions.push_back(Direction::Decreasing);
    else
      o.directions.push_back(Direction::Constant);
  }
  return o;
}

Orientation orientation(const LinearThresholdFunction& f) {
  Orientation o;
  for (auto w : f.weights())
    o.directions.push_back(w > 0 ? Direction::Increasing : w < 0 ? Direction::Decreasing : Direction::Constant);
  return o;
}

std::pair<TruthTable, std::vector<int>> normalize_increasing(const TruthTable& t, const Orientation& o) {
  if (o.directions.size() != t.num_vars()) throw DimensionError("orientation length does not match table");
  if (!o.unate()) throw DomainError("normalize_increasing: function is not unate");
  auto sigma = o.sign_vector();
  std::uint64_t z = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (sigma[i] < 0) z |= 1ULL << i;
  return {xor_permute(t, z), std::move(sigma)};
}

}  // namespace halfsens

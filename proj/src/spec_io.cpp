#include "halfsens/spec_io.hpp"

#include <fstream>

#include "halfsens/error.hpp"

namespace halfsens {

using nlohmann::json;

json to_json(const CompositeSpec& spec) {
  json terms = json::array();
  for (const auto& t : spec.terms()) {
    const auto* f = std::get_if<LinearThresholdFunction>(&t);
    if (!f) throw ConfigError("only halfspace terms can be serialized");
    terms.push_back({{"weights", std::vector<std::int64_t>(f->weights().begin(), f->weights().end())},
                     {"threshold", f->threshold()}});
  }
  return {{"n", spec.num_vars()},
          {"combiner", spec.combiner() == Combiner::And ? "AND" : "OR"},
          {"terms", std::move(terms)}};
}

CompositeSpec spec_from_json(const json& doc) {
  try {
    const unsigned n = doc.at("n").get<unsigned>();
    const auto comb = doc.value("combiner", std::string("AND"));
    Combiner c;
    if (comb == "AND" || comb == "and")
      c = Combiner::And;
    else if (comb == "OR" || comb == "or")
      c = Combiner::Or;
    else
      throw ConfigError("combiner must be AND or OR, got '" + comb + "'");
    CompositeSpec spec(n, c);
    for (const auto& term : doc.at("terms"))
      spec.add_term(LinearThresholdFunction(term.at("weights").get<std::vector<std::int64_t>>(),
                                            term.at("threshold").get<std::int64_t>()));
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid spec: ") + e.what());
  }
}

CompositeSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("spec file " + path + " is not valid JSON: " + e.what());
  }
  return spec_from_json(doc);
}

void save_spec(const std::string& path, const CompositeSpec& spec, const json& metadata) {
  json doc = to_json(spec);
  if (!metadata.is_null()) doc["metadata"] = metadata;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace halfsens

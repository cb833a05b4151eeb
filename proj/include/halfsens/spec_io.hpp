#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "halfsens/composite.hpp"

namespace halfsens {

/// {"n": .., "combiner": "AND"|"OR", "terms": [{"weights": [..], "threshold": ..}]}
/// Table terms are not representable and are rejected on write.
nlohmann::json to_json(const CompositeSpec& spec);
CompositeSpec spec_from_json(const nlohmann::json& doc);

CompositeSpec load_spec(const std::string& path);
void save_spec(const std::string& path, const CompositeSpec& spec, const nlohmann::json& metadata = {});

}  // namespace halfsens

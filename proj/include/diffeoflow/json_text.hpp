#pragma once

#include <json.hpp>

#include <string>

namespace diffeoflow {

using Json = nlohmann::ordered_json;

/// Serializes JSON with every floating-point number printed as %.17g, so
/// equal inputs give byte-identical text. Non-finite numbers become null.
std::string dump_json(const Json& value, int indent = 2);

}  // namespace diffeoflow

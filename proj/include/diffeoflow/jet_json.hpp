#pragma once

#include "diffeoflow/jet.hpp"
#include "diffeoflow/json_text.hpp"

namespace diffeoflow {

/// {order, base_point, domain_dim, codomain_dim, terms: [{degree, coeffs: {"i,j,..": [per component]}}]}
Json jet_to_json(const Jet<double>& jet);
/// Inverse of jet_to_json; throws ParseError on malformed input.
Jet<double> jet_from_json(const Json& value);

}  // namespace diffeoflow

#pragma once

#include <json.hpp>

#include "exact/poly.hpp"

namespace canheight {

using Json = nlohmann::ordered_json;

/// Rationals travel as strings ("p/q" or "n"); plain JSON integers are also
/// accepted on input.
Json rat_to_json(const Rat& q);
Rat rat_from_json(const Json& j);

/// Polynomials travel as arrays of rationals in ascending degree.
Json poly_to_json(const PolyQ& p);
PolyQ poly_from_json(const Json& j);

/// Parses JSON text, converting parse failures to Error(Input).
Json parse_json(const std::string& text);

}  // namespace canheight

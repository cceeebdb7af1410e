#include "exact/serialize.hpp"

#include "exact/error.hpp"

namespace canheight {

Json rat_to_json(const Rat& q) { return to_string(q); }

Rat rat_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rat(std::to_string(j.get<long long>()));
  fail(ErrorKind::Input, "expected a rational string, got " + j.dump());
}

Json poly_to_json(const PolyQ& p) {
  Json out = Json::array();
  for (const Rat& c : p.coeffs()) out.push_back(rat_to_json(c));
  return out;
}

PolyQ poly_from_json(const Json& j) {
  if (!j.is_array()) fail(ErrorKind::Input, "polynomial must be a JSON array of rationals");
  std::vector<Rat> c;
  c.reserve(j.size());
  for (const auto& e : j) c.push_back(rat_from_json(e));
  return PolyQ(std::move(c));
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Input, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace canheight

#include "stabforge/class_json.hpp"

namespace stabforge {

Json rational_to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw StabforgeError("expected an exact rational (\"p/q\" string or integer), got " + j.dump());
}

Json gaussian_to_json(const GaussianRational& z) {
  return Json{{"re", to_string(z.re())}, {"im", to_string(z.im())}};
}

Json space_to_json(const ProductSpace& space) {
  Json factors = Json::array();
  for (const auto& f : space.factors())
    factors.push_back({{"name", f.name}, {"genus", f.genus}, {"iso", f.iso_class}});
  return Json{{"factors", factors}};
}

SpacePtr space_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("factors") || !j["factors"].is_array())
    throw StabforgeError("space: expected {\"factors\": [...]}");
  std::vector<CurveFactor> fs;
  for (const auto& f : j["factors"]) {
    CurveFactor c;
    c.name = f.at("name").get<std::string>();
    c.genus = f.at("genus").get<int>();
    c.iso_class = f.value("iso", c.name);
    fs.push_back(std::move(c));
  }
  return std::make_shared<const ProductSpace>(std::move(fs));
}

Json class_to_json(const GradedClass& v) {
  Json out = Json::array();
  for (const auto& [m, c] : v.terms()) {
    Json symbols = Json::array();
    for (std::size_t k = 0; k < m.size(); ++k) symbols.push_back(code_symbol(m[k]));
    out.push_back({{"factors", symbols}, {"re", to_string(c.re())}, {"im", to_string(c.im())}});
  }
  return out;
}

GradedClass class_from_json(const Json& j, const SpacePtr& space) {
  if (!j.is_array()) throw StabforgeError("class: expected an array of terms");
  GradedClass v(space);
  for (const auto& term : j) {
    const Json& symbols = term.at("factors");
    if (!symbols.is_array() || symbols.size() != space->dimension())
      throw StabforgeError("class term: factor list length does not match the space");
    Monomial m(space->dimension());
    for (std::size_t k = 0; k < m.size(); ++k)
      m.set(k, parse_code(symbols[k].get<std::string>(), space->factor(k).genus));
    Rational re = term.contains("re") ? rational_from_json(term["re"]) : Rational(0);
    Rational im = term.contains("im") ? rational_from_json(term["im"]) : Rational(0);
    v.add_term(m, GaussianRational(re, im));
  }
  return v;
}

}  // namespace stabforge

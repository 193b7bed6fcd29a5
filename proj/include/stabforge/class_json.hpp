#pragma once

// JSON forms of exact values and classes.
//   rational:  "p/q" string
//   class:     [{"factors": ["1", "e2", "pt"], "re": "p/q", "im": "p/q"}, ...]
//   space:     {"factors": [{"name": "E1", "genus": 1, "iso": "E"}, ...]}

#include "stabforge/cohomology.hpp"

#include <json.hpp>

namespace stabforge {

using Json = nlohmann::json;

Json rational_to_json(const Rational& q);
/// Accepts "p/q" strings and JSON integers; floats are rejected.
Rational rational_from_json(const Json& j);

Json gaussian_to_json(const GaussianRational& z);

Json space_to_json(const ProductSpace& space);
SpacePtr space_from_json(const Json& j);

Json class_to_json(const GradedClass& v);
GradedClass class_from_json(const Json& j, const SpacePtr& space);

}  // namespace stabforge

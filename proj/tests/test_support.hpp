#pragma once

#include "stabforge/cohomology.hpp"

#include <random>

namespace stabforge::testing {

inline Rational random_rational(std::mt19937_64& rng, int span = 5) {
  std::uniform_int_distribution<int> num(-span, span);
  std::uniform_int_distribution<int> den(1, 4);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

inline GaussianRational random_gaussian(std::mt19937_64& rng) {
  return {random_rational(rng), random_rational(rng)};
}

inline Monomial random_monomial(std::mt19937_64& rng, const ProductSpace& space) {
  Monomial m(space.dimension());
  for (std::size_t k = 0; k < m.size(); ++k) {
    int g = space.factor(k).genus;
    std::uniform_int_distribution<int> pick(0, 2 * g + 1);
    int c = pick(rng);
    m.set(k, c == 2 * g + 1 ? Monomial::kPoint : static_cast<std::uint8_t>(c));
  }
  return m;
}

/// Sparse class with up to `terms` random monomials.
inline GradedClass random_class(std::mt19937_64& rng, const SpacePtr& space, int terms = 4) {
  GradedClass v(space);
  std::uniform_int_distribution<int> count(0, terms);
  for (int i = count(rng); i > 0; --i) v.add_term(random_monomial(rng, *space), random_gaussian(rng));
  return v;
}

inline GradedClass random_homogeneous(std::mt19937_64& rng, const SpacePtr& space, int degree, int terms = 3) {
  GradedClass v(space);
  for (int i = 0; i < 40 && static_cast<int>(v.size()) < terms; ++i) {
    Monomial m = random_monomial(rng, *space);
    if (m.degree() == degree) v.add_term(m, random_gaussian(rng));
  }
  return v;
}

/// Rational class with even components of degree >= 2.
inline GradedClass random_even_nilpotent(std::mt19937_64& rng, const SpacePtr& space, int terms = 3) {
  GradedClass v(space);
  for (int i = 0; i < 60 && static_cast<int>(v.size()) < terms; ++i) {
    Monomial m = random_monomial(rng, *space);
    if (m.degree() >= 2 && m.degree() % 2 == 0) v.add_term(m, GaussianRational(random_rational(rng)));
  }
  return v;
}

inline SpacePtr random_space(std::mt19937_64& rng, std::size_t max_factors, int max_genus = 2) {
  std::uniform_int_distribution<std::size_t> nf(1, max_factors);
  std::uniform_int_distribution<int> g(1, max_genus);
  std::vector<int> genera(nf(rng));
  for (auto& x : genera) x = g(rng);
  return ProductSpace::from_genera(genera);
}

}  // namespace stabforge::testing

#include "stabforge/riemann_roch.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace stabforge;

namespace {

GaussianRational q(long p) { return GaussianRational(make_rational(p)); }

std::vector<std::vector<std::size_t>> proper_subsets(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (1u << k)) s.push_back(k);
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("todd class of the fiber") {
  auto ee = ProductSpace::elliptic(2);
  CHECK(todd_fiber(ProjectionSpec(ee, {1})) == GradedClass::unit(ee));
  auto eg = ProductSpace::from_genera({1, 2});
  CHECK(todd_fiber(ProjectionSpec(eg, {1})) == GradedClass::unit(eg) - GradedClass::point(eg, 1));
  auto eee = ProductSpace::elliptic(3);
  CHECK(todd_fiber(ProjectionSpec(eee, {1, 2})) == GradedClass::unit(eee));
  CHECK_THROWS_AS(ProjectionSpec(ee, {0, 1}), StabforgeError);
  CHECK_THROWS_AS(ProjectionSpec(ee, {2}), StabforgeError);
}

TEST_CASE("pushforward along a projection") {
  auto ee = ProductSpace::elliptic(2);
  ProjectionSpec p(ee, {1});
  auto ptc = GradedClass::point(ee, 1);
  CHECK(grr_proj_pushforward(ptc, p) == GradedClass::unit(p.base()));
  CHECK(grr_proj_pushforward(GradedClass::unit(ee), p).is_zero());
  for (long n : {0L, 1L, 3L, -2L}) {
    auto v = GradedClass::unit(ee) + ptc * q(n);
    CHECK(grr_proj_pushforward(v, p) == GradedClass::unit(p.base()) * q(n));
  }
  // genus 2 fiber: p_*(1) = chi(O_C) = 1 - g
  auto eg = ProductSpace::from_genera({1, 2});
  ProjectionSpec pg(eg, {1});
  CHECK(grr_proj_pushforward(GradedClass::unit(eg), pg) == GradedClass::unit(pg.base()) * q(-1));
}

TEST_CASE("pushforward along a fiber inclusion") {
  auto ee = ProductSpace::elliptic(2);
  FiberInclusionSpec i(ee, {1});
  CHECK(fiber_pushforward(GradedClass::unit(i.base()), i) == GradedClass::point(ee, 1));
  CHECK(fiber_pushforward(GradedClass::point(i.base(), 0), i) == GradedClass::top(ee));
  CHECK_THROWS_AS(fiber_pushforward(GradedClass::unit(ee), i), StabforgeError);
}

TEST_CASE("line bundle twists") {
  auto ee = ProductSpace::elliptic(2);
  auto ptc = GradedClass::point(ee, 1);
  auto one = GradedClass::unit(ee);
  CHECK(tensor_line_bundle(one, ptc, 3) == one + ptc * q(3));
  CHECK(tensor_line_bundle(ptc, GradedClass::zero(ee)) == ptc);
  CHECK(tensor_line_bundle(ptc, ptc) == ptc);
  CHECK_THROWS_AS(tensor_line_bundle(one, one), StabforgeError);
  CHECK_THROWS_AS(tensor_line_bundle(one, GradedClass::top(ee)), StabforgeError);
}

TEST_CASE("Euler identity for point fibers") {
  std::mt19937_64 rng(11);
  for (std::size_t collapsed = 0; collapsed <= 4; ++collapsed) {
    auto space = ProductSpace::elliptic(collapsed + 1);
    std::vector<std::size_t> idx;
    for (std::size_t k = 1; k <= collapsed; ++k) idx.push_back(k);
    FiberInclusionSpec spec(space, idx);
    for (int trial = 0; trial < 10; ++trial) {
      auto v = stabforge::testing::random_class(rng, spec.base());
      auto r = euler_identity_check(v, spec);
      CHECK(r.holds);
      if (collapsed == 0) {
        CHECK(r.alternating_sum == v);
      } else {
        CHECK(r.alternating_sum.is_zero());
      }
    }
  }
}

TEST_CASE("property: projection formula (exhaustive, n <= 3)") {
  for (const auto& genera : std::vector<std::vector<int>>{{1, 1}, {1, 2}, {2, 1, 1}, {1, 1, 1}}) {
    auto space = ProductSpace::from_genera(genera);
    for (const auto& removed : proper_subsets(space->dimension())) {
      ProjectionSpec p(space, removed);
      auto base_basis = monomial_basis(*p.base());
      for (const auto& mv : monomial_basis(*space)) {
        auto v = GradedClass::monomial(space, mv);
        auto pv = grr_proj_pushforward(v, p);
        for (const auto& mw : base_basis) {
          auto w = GradedClass::monomial(p.base(), mw);
          CHECK(grr_proj_pushforward(v * pullback(w, p), p) == pv * w);
        }
      }
    }
  }
}

TEST_CASE("property: pushforwards compose") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 50; ++trial) {
    auto space = stabforge::testing::random_space(rng, 4);
    if (space->dimension() < 3) continue;
    std::size_t n = space->dimension();
    std::size_t a = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    std::size_t b = (a + 1 + std::uniform_int_distribution<std::size_t>(0, n - 2)(rng)) % n;
    auto v = stabforge::testing::random_class(rng, space, 6);
    ProjectionSpec first(space, {a});
    // index of b inside the base of the first projection
    std::size_t b_in_base = b > a ? b - 1 : b;
    ProjectionSpec second(first.base(), {b_in_base});
    ProjectionSpec both(space, {a, b});
    CHECK(grr_proj_pushforward(grr_proj_pushforward(v, first), second) == grr_proj_pushforward(v, both));
  }
}

TEST_CASE("property: i_* p_* is the identity on fiber-supported classes") {
  for (const auto& genera : std::vector<std::vector<int>>{{1, 1}, {2, 1}, {1, 2}, {1, 1, 1}, {1, 2, 3}}) {
    auto space = ProductSpace::from_genera(genera);
    std::size_t last = space->dimension() - 1;
    ProjectionSpec p(space, {last});
    FiberInclusionSpec i(space, {last});
    for (const auto& m : monomial_basis(*space)) {
      if (m[last] != Monomial::kPoint) continue;
      auto v = GradedClass::monomial(space, m);
      CHECK(fiber_pushforward(grr_proj_pushforward(v, p), i) == v);
    }
    for (const auto& m : monomial_basis(*i.base())) {
      auto w = GradedClass::monomial(i.base(), m);
      CHECK(grr_proj_pushforward(fiber_pushforward(w, i), p) == w);
    }
  }
}

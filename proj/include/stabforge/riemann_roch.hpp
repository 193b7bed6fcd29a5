#pragma once

// Chern-character transport along the two kinds of maps the constructions use:
// projections p: X x F -> X forgetting some curve factors, and inclusions
// i: X -> X x F of a point-fiber {x} x ... collapsed factors.

#include "stabforge/cohomology.hpp"

#include <vector>

namespace stabforge {

class ProjectionSpec {
 public:
  /// `removed` must be a proper subset of the factor indices.
  ProjectionSpec(SpacePtr ambient, std::vector<std::size_t> removed);

  const SpacePtr& ambient() const { return ambient_; }
  const SpacePtr& base() const { return base_; }
  const std::vector<std::size_t>& removed() const { return removed_; }
  const std::vector<std::size_t>& kept() const { return kept_; }

 private:
  SpacePtr ambient_;
  SpacePtr base_;
  std::vector<std::size_t> removed_;
  std::vector<std::size_t> kept_;
};

class FiberInclusionSpec {
 public:
  /// Collapsing no factor is allowed (the identity inclusion).
  FiberInclusionSpec(SpacePtr ambient, std::vector<std::size_t> collapsed);

  const SpacePtr& ambient() const { return ambient_; }
  const SpacePtr& base() const { return base_; }
  const std::vector<std::size_t>& collapsed() const { return collapsed_; }
  const std::vector<std::size_t>& kept() const { return kept_; }

 private:
  SpacePtr ambient_;
  SpacePtr base_;
  std::vector<std::size_t> collapsed_;
  std::vector<std::size_t> kept_;
};

/// Product over removed factors of td(T_C) = 1 + (1 - g) pt.
GradedClass todd_fiber(const ProjectionSpec& spec);

/// ch(p_* E) from v = ch(E): fiber integral of v * td_fiber.
GradedClass grr_proj_pushforward(const GradedClass& v, const ProjectionSpec& spec);

/// p^* w: extend by the unit on removed factors.
GradedClass pullback(const GradedClass& w, const ProjectionSpec& spec);

/// ch(i_* F) from v = ch(F); the normal bundle is trivial so td(N) = 1.
GradedClass fiber_pushforward(const GradedClass& v, const FiberInclusionSpec& spec);

/// i^* on cohomology: keep monomials that are units on the collapsed factors.
GradedClass fiber_restrict(const GradedClass& v, const FiberInclusionSpec& spec);

/// v * exp(twists * l) = ch(E (x) L^twists) for l = c_1(L) of pure degree 2.
GradedClass tensor_line_bundle(const GradedClass& v, const GradedClass& l, long twists = 1);

struct EulerCheck {
  bool holds = false;
  GradedClass restricted_pushforward;  // i^* i_* v
  GradedClass alternating_sum;         // sum_k (-1)^k C(n,k) v
};

/// Compares i^* i_* v against the K-theoretic decomposition of i^* i_* E into
/// shifted copies of E: both vanish once a factor is collapsed.
EulerCheck euler_identity_check(const GradedClass& v, const FiberInclusionSpec& spec);

}  // namespace stabforge

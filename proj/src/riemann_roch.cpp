#include "stabforge/riemann_roch.hpp"

#include <algorithm>

namespace stabforge {

namespace {

std::vector<std::size_t> normalized_indices(std::vector<std::size_t> idx, std::size_t n, const char* what) {
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
    throw StabforgeError(std::string(what) + ": repeated factor index");
  if (!idx.empty() && idx.back() >= n) throw StabforgeError(std::string(what) + ": factor index out of range");
  return idx;
}

std::vector<std::size_t> complement(const std::vector<std::size_t>& idx, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < n; ++k)
    if (!std::binary_search(idx.begin(), idx.end(), k)) out.push_back(k);
  return out;
}

SpacePtr sub_space(const ProductSpace& ambient, const std::vector<std::size_t>& kept) {
  std::vector<CurveFactor> fs;
  for (auto k : kept) fs.push_back(ambient.factor(k));
  return std::make_shared<const ProductSpace>(std::move(fs));
}

// Base monomial -> ambient monomial with `fill` on the complementary factors.
Monomial embed(const Monomial& m, const std::vector<std::size_t>& kept, std::size_t n, std::uint8_t fill) {
  Monomial out(std::vector<std::uint8_t>(n, fill));
  for (std::size_t j = 0; j < kept.size(); ++j) out.set(kept[j], m[j]);
  return out;
}

Monomial project(const Monomial& m, const std::vector<std::size_t>& kept) {
  Monomial out(kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) out.set(j, m[kept[j]]);
  return out;
}

}  // namespace

ProjectionSpec::ProjectionSpec(SpacePtr ambient, std::vector<std::size_t> removed)
    : ambient_(std::move(ambient)),
      removed_(normalized_indices(std::move(removed), ambient_->dimension(), "projection")) {
  if (removed_.size() >= ambient_->dimension() && ambient_->dimension() > 0)
    throw StabforgeError("projection: removed factors must be a proper subset");
  kept_ = complement(removed_, ambient_->dimension());
  base_ = sub_space(*ambient_, kept_);
}

FiberInclusionSpec::FiberInclusionSpec(SpacePtr ambient, std::vector<std::size_t> collapsed)
    : ambient_(std::move(ambient)),
      collapsed_(normalized_indices(std::move(collapsed), ambient_->dimension(), "fiber inclusion")) {
  kept_ = complement(collapsed_, ambient_->dimension());
  base_ = sub_space(*ambient_, kept_);
}

GradedClass todd_fiber(const ProjectionSpec& spec) {
  GradedClass td = GradedClass::unit(spec.ambient());
  for (auto j : spec.removed()) {
    Rational c(1 - spec.ambient()->factor(j).genus);
    td = td * (GradedClass::unit(spec.ambient()) + GradedClass::point(spec.ambient(), j) * GaussianRational(c));
  }
  return td;
}

GradedClass grr_proj_pushforward(const GradedClass& v, const ProjectionSpec& spec) {
  require_same_space(v.space(), spec.ambient(), "grr_proj_pushforward");
  GradedClass integrand = v * todd_fiber(spec);
  GradedClass out(spec.base());
  for (const auto& [m, c] : integrand.terms()) {
    bool full = std::all_of(spec.removed().begin(), spec.removed().end(),
                            [&](std::size_t j) { return m[j] == Monomial::kPoint; });
    // The removed part is a product of point classes, which are even: moving
    // it to the right costs no sign.
    if (full) out.add_term(project(m, spec.kept()), c);
  }
  return out;
}

GradedClass pullback(const GradedClass& w, const ProjectionSpec& spec) {
  require_same_space(w.space(), spec.base(), "pullback");
  GradedClass out(spec.ambient());
  for (const auto& [m, c] : w.terms())
    out.add_term(embed(m, spec.kept(), spec.ambient()->dimension(), Monomial::kUnit), c);
  return out;
}

GradedClass fiber_pushforward(const GradedClass& v, const FiberInclusionSpec& spec) {
  require_same_space(v.space(), spec.base(), "fiber_pushforward");
  GradedClass out(spec.ambient());
  for (const auto& [m, c] : v.terms()) {
    Monomial e = embed(m, spec.kept(), spec.ambient()->dimension(), Monomial::kUnit);
    for (auto j : spec.collapsed()) e.set(j, Monomial::kPoint);
    out.add_term(e, c);
  }
  return out;
}

GradedClass fiber_restrict(const GradedClass& v, const FiberInclusionSpec& spec) {
  require_same_space(v.space(), spec.ambient(), "fiber_restrict");
  GradedClass out(spec.base());
  for (const auto& [m, c] : v.terms()) {
    bool units = std::all_of(spec.collapsed().begin(), spec.collapsed().end(),
                             [&](std::size_t j) { return m[j] == Monomial::kUnit; });
    if (units) out.add_term(project(m, spec.kept()), c);
  }
  return out;
}

GradedClass tensor_line_bundle(const GradedClass& v, const GradedClass& l, long twists) {
  require_same_space(v.space(), l.space(), "tensor_line_bundle");
  if (!l.is_homogeneous(2)) throw StabforgeError("tensor_line_bundle: line class must be of pure degree 2");
  return v * exp_nilpotent(l * GaussianRational(twists));
}

EulerCheck euler_identity_check(const GradedClass& v, const FiberInclusionSpec& spec) {
  EulerCheck out{false, fiber_restrict(fiber_pushforward(v, spec), spec), GradedClass(spec.base())};
  const long n = static_cast<long>(spec.collapsed().size());
  mpz_class binom = 1;
  Rational total = 0;
  for (long k = 0; k <= n; ++k) {
    total += (k % 2 == 0) ? Rational(binom) : Rational(-binom);
    binom = binom * (n - k) / (k + 1);
  }
  out.alternating_sum = v * GaussianRational(total);
  out.holds = out.restricted_pushforward == out.alternating_sum;
  return out;
}

}  // namespace stabforge

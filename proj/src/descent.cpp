#include "stabforge/descent.hpp"

namespace stabforge {

namespace {

std::vector<GradedClass> monomial_classes(const SpacePtr& space) {
  std::vector<GradedClass> out;
  for (const auto& m : monomial_basis(*space)) out.push_back(GradedClass::monomial(space, m));
  return out;
}

std::vector<std::string> labels(const std::vector<GradedClass>& classes) {
  std::vector<std::string> out;
  for (const auto& c : classes) {
    if (c.terms().size() == 1 && c.terms().begin()->second == GaussianRational(1))
      out.push_back(monomial_label(*c.space(), c.terms().begin()->first));
    else
      out.push_back(c.str());
  }
  return out;
}

}  // namespace

Restriction restrict_charge(const Charge& z, const FiberInclusionSpec& spec,
                            std::optional<std::vector<GradedClass>> source,
                            std::optional<std::vector<GradedClass>> target, bool saturated) {
  require_same_space(charge_space(z), spec.ambient(), "restrict_charge");
  std::vector<GradedClass> src = source ? std::move(*source) : monomial_classes(spec.base());
  std::vector<GradedClass> tgt = target ? std::move(*target) : monomial_classes(spec.ambient());
  for (const auto& s : src) require_same_space(s.space(), spec.base(), "restrict_charge source");

  ClassCoordinates coords(tgt);
  std::vector<std::vector<Rational>> cols;
  for (const auto& s : src) {
    auto x = coords.solve(fiber_pushforward(s, spec));
    if (!x) throw StabforgeError("image of " + s.str() + " is not in the target working lattice");
    cols.push_back(std::move(*x));
  }
  LatticeMap inclusion;
  inclusion.matrix = clear_denominators(cols, tgt.size(), &inclusion.denominator);
  inclusion.source_labels = labels(src);
  inclusion.target_labels = labels(tgt);

  LatticeMap lambda0 = image_lattice(inclusion, saturated);
  return {KernelCharge(fiber_restrict(charge_kernel(z), spec)), std::move(inclusion), std::move(lambda0)};
}

GaussianRational DescendedCharge::evaluate(const std::vector<Rational>& coords) const {
  if (coords.size() != values.size()) throw StabforgeError("coordinate vector has wrong length");
  GaussianRational out;
  for (std::size_t j = 0; j < coords.size(); ++j) out += values[j] * GaussianRational(coords[j]);
  return out;
}

DescendedCharge descend_charge_to_quotient(const Charge& z, std::span<const ProductGroupElement> generators,
                                           std::optional<std::vector<GradedClass>> basis) {
  InvarianceReport inv = charge_invariance_check(z, generators);
  if (!inv.holds) {
    std::string w = inv.witness ? monomial_label(*charge_space(z), *inv.witness) : "?";
    throw InvarianceError("charge is not invariant under generator " + std::to_string(*inv.generator) +
                              " (witness " + w + ": " + inv.before.str() + " vs " + inv.after.str() + ")",
                          inv);
  }
  std::vector<GradedClass> b = basis ? std::move(*basis) : monomial_classes(charge_space(z));
  DescendedCharge out;
  out.invariant = invariant_sublattice(generators, b);
  out.invariant.target_labels = labels(b);
  ClassCoordinates coords(b);
  for (std::size_t c = 0; c < out.invariant.matrix.cols(); ++c) {
    std::vector<Rational> x;
    for (std::size_t r = 0; r < out.invariant.matrix.rows(); ++r) x.push_back(Rational(out.invariant.matrix.at(r, c)));
    GradedClass v = coords.combine(x);
    out.values.push_back(stabforge::evaluate(z, v));
    out.classes.push_back(std::move(v));
  }
  return out;
}

LiftReport lift_criterion_check(const GradedClass& ch_l) {
  LiftReport r{false, ch_l - GradedClass::unit(ch_l.space())};
  r.holds = r.difference.is_zero();
  return r;
}

namespace {

Rational quadratic_form(const std::vector<std::vector<Rational>>& gram, const std::vector<Rational>& v) {
  Rational s = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) s += v[i] * gram[i][j] * v[j];
  return s;
}

// Sylvester's criterion through exact Gaussian elimination: all pivots > 0.
bool positive_definite(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (sgn(a[k][k]) <= 0) return false;
    for (std::size_t i = k + 1; i < n; ++i) {
      Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return true;
}

}  // namespace

SupportReport effective_support_constant(const Charge& z, const std::vector<GradedClass>& lattice_basis,
                                         const std::vector<std::vector<Rational>>& gram,
                                         const std::vector<std::vector<Rational>>& classes) {
  const std::size_t k = lattice_basis.size();
  if (gram.size() != k) throw StabforgeError("gram matrix size does not match the lattice basis");
  for (std::size_t i = 0; i < k; ++i) {
    if (gram[i].size() != k) throw StabforgeError("gram matrix must be square");
    for (std::size_t j = 0; j < i; ++j)
      if (gram[i][j] != gram[j][i]) throw StabforgeError("gram matrix must be symmetric");
  }
  if (!positive_definite(gram)) throw StabforgeError("gram matrix is not positive definite");

  SupportReport r;
  r.gram = gram;
  if (classes.empty()) return r;
  ClassCoordinates coords(lattice_basis);
  for (std::size_t idx = 0; idx < classes.size(); ++idx) {
    const auto& v = classes[idx];
    if (v.size() != k) throw StabforgeError("class coordinate vector has wrong length");
    Rational norm2 = quadratic_form(gram, v);
    if (sgn(norm2) == 0) continue;
    Rational zabs2 = evaluate(z, coords.combine(v)).norm2();
    if (sgn(zabs2) == 0) {
      r.infinite = true;
      r.witness = idx;
      return r;
    }
    Rational ratio = norm2 / zabs2;
    if (!r.witness || ratio > r.c_squared) {
      r.c_squared = ratio;
      r.witness = idx;
    }
  }
  return r;
}

Json support_report_to_json(const SupportReport& r) {
  Json j;
  j["constant_squared"] = r.infinite ? Json("infinite") : rational_to_json(r.c_squared);
  j["witness"] = r.witness ? Json(*r.witness) : Json(nullptr);
  Json g = Json::array();
  for (const auto& row : r.gram) {
    Json jr = Json::array();
    for (const auto& x : row) jr.push_back(rational_to_json(x));
    g.push_back(jr);
  }
  j["gram"] = g;
  return j;
}

}  // namespace stabforge

#pragma once

// Finite groups acting on the cohomology of a product of curves through
// factor permutations and integral symplectic automorphisms of each H^1.

#include "stabforge/charge.hpp"
#include "stabforge/lattice.hpp"

#include <string>
#include <vector>

namespace stabforge {

/// Integral matrix on (e_1, ..., e_2g), column convention: e_j -> sum_k M[k][j] e_k.
struct CurveAut {
  std::vector<std::vector<long>> matrix;
  std::string label;

  int genus() const { return static_cast<int>(matrix.size() / 2); }
  friend bool operator==(const CurveAut& a, const CurveAut& b) { return a.matrix == b.matrix; }
};

CurveAut identity_aut(int genus);
CurveAut inversion_aut(int genus);
/// [[0,-1],[1,-1]] on an elliptic H^1.
CurveAut order3_aut();

struct StandardAuts {
  CurveAut identity, inversion, order3;
};
/// The genus-1 identity, inversion and order-3 automorphism.
StandardAuts standard_auts();

/// Checks M^T J M = J and finite order; throws StabforgeError otherwise.
void validate_aut(const CurveAut& a);
CurveAut compose(const CurveAut& a, const CurveAut& b);  // a after b
/// Smallest k >= 1 with M^k = I.
int aut_order(const CurveAut& a);

/// Acts by x^(i) -> (A_i x)^(perm[i]) on generators, extended multiplicatively.
struct ProductGroupElement {
  std::vector<std::size_t> perm;
  std::vector<CurveAut> auts;
  std::string label;

  std::size_t size() const { return perm.size(); }
  friend bool operator==(const ProductGroupElement& a, const ProductGroupElement& b) {
    return a.perm == b.perm && a.auts == b.auts;
  }
};

ProductGroupElement identity_element(const ProductSpace& space);
/// Throws when the permutation mixes non-isomorphic factors or an automorphism
/// has the wrong size or is not symplectic.
void validate_element(const ProductSpace& space, const ProductGroupElement& g);
/// (sigma, A)(tau, B) = (sigma tau, C) with C_i = A_{tau(i)} B_i.
ProductGroupElement compose(const ProductGroupElement& g, const ProductGroupElement& h);

GradedClass act(const ProductGroupElement& g, const GradedClass& v);

struct GroupScenario {
  SpacePtr space;
  std::vector<ProductGroupElement> generators;
  std::size_t order_bound = 1024;
  std::string kind;
  std::string note;  // e.g. which components are translations
};

/// All products of generators, identity first, in breadth-first order.
/// Throws when more than order_bound distinct elements appear.
std::vector<ProductGroupElement> close_group(const GroupScenario& scenario);

/// Fixed sublattice of the Z-span of basis under the given elements.
/// Source labels name the invariant basis vectors; target labels are the
/// input basis indices. Throws when the basis is not stable.
LatticeMap invariant_sublattice(std::span<const ProductGroupElement> group, const std::vector<GradedClass>& basis);

struct InvarianceReport {
  bool holds = true;
  std::size_t checked = 0;
  std::optional<std::size_t> generator;  // index of a failing generator
  std::optional<Monomial> witness;
  GaussianRational before, after;
};

/// Z(act(g, v)) = Z(v) for every generator g and every basis monomial v.
InvarianceReport charge_invariance_check(const Charge& z, std::span<const ProductGroupElement> generators);

/// kind: "kummer", "enriques", "bielliptic" (m = 2 or 3), "cynk-hulek" (m = 2 or 3).
GroupScenario scenario_builder(const std::string& kind, std::size_t n, int m = 2);

Json element_to_json(const ProductGroupElement& g);
/// {"perm": [...], "auts": [matrix | "id" | "inv" | "zeta3", ...]}
ProductGroupElement element_from_json(const Json& j, const ProductSpace& space);

}  // namespace stabforge

#pragma once

// Moving charges between lattices: restriction to a fiber, descent to the
// invariant sublattice of a finite group, the ch(L) = 1 lift criterion, and
// support constants on finite class sets.

#include "stabforge/group_action.hpp"

#include <optional>
#include <stdexcept>

namespace stabforge {

struct Restriction {
  KernelCharge charge;   // Z_0 = Z o i_*, as a charge on the base
  LatticeMap inclusion;  // [i_*]: source classes -> target classes
  LatticeMap lambda0;    // image of [i_*], HNF (saturated on request)
};

/// Working lattices default to the full monomial bases of base and ambient.
/// Every source image must lie in the Q-span of the target classes.
Restriction restrict_charge(const Charge& z, const FiberInclusionSpec& spec,
                            std::optional<std::vector<GradedClass>> source = std::nullopt,
                            std::optional<std::vector<GradedClass>> target = std::nullopt, bool saturated = false);

class InvarianceError : public StabforgeError {
 public:
  InvarianceError(const std::string& what, InvarianceReport report)
      : StabforgeError(what), report_(std::move(report)) {}
  const InvarianceReport& report() const { return report_; }

 private:
  InvarianceReport report_;
};

struct DescendedCharge {
  LatticeMap invariant;                    // invariant basis in terms of the working basis
  std::vector<GradedClass> classes;        // invariant basis vectors as classes
  std::vector<GaussianRational> values;    // Z on each invariant basis vector

  /// Z on the invariant lattice vector with the given coordinates.
  GaussianRational evaluate(const std::vector<Rational>& coords) const;
};

/// Restricts Z to the invariant sublattice of the working basis (default: the
/// full monomial basis). Throws InvarianceError when Z is not invariant.
DescendedCharge descend_charge_to_quotient(const Charge& z, std::span<const ProductGroupElement> generators,
                                           std::optional<std::vector<GradedClass>> basis = std::nullopt);

struct LiftReport {
  bool holds = false;
  GradedClass difference;  // ch(L) - 1
};

/// True iff the full Chern character of L is the unit class, in which case
/// tensoring by L fixes every class and every charge.
LiftReport lift_criterion_check(const GradedClass& ch_l);

struct SupportReport {
  bool infinite = false;
  Rational c_squared = 0;               // max of |v|^2 / |Z(v)|^2
  std::optional<std::size_t> witness;   // index into the class list
  std::vector<std::vector<Rational>> gram;
};

/// Classes are coordinate vectors over lattice_basis; the norm is v^T gram v.
/// Zero vectors are skipped. Throws when gram is not symmetric positive definite.
SupportReport effective_support_constant(const Charge& z, const std::vector<GradedClass>& lattice_basis,
                                         const std::vector<std::vector<Rational>>& gram,
                                         const std::vector<std::vector<Rational>>& classes);

Json support_report_to_json(const SupportReport& r);

}  // namespace stabforge

#pragma once

// Central charges on products of curves.
//
// A KernelCharge is Z(v) = -integrate(K * v) for a fixed class K; the
// exponential family uses K = exp(-(b + i w) H). The extension over one more
// curve factor C is described by four rational functionals (a, b, c, d) with
//
//   Z_base(p_*(E (x) q^*L^n)) = (a(E) + i c(E)) n + (b(E) + i d(E)),
//
// and the extended charge is s c + b - beta a + i (-t a + d - beta c).

#include "stabforge/class_json.hpp"
#include "stabforge/cohomology.hpp"
#include "stabforge/riemann_roch.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace stabforge {

class KernelCharge {
 public:
  explicit KernelCharge(GradedClass kernel) : kernel_(std::move(kernel)) {}

  const SpacePtr& space() const { return kernel_.space(); }
  const GradedClass& kernel() const { return kernel_; }
  GaussianRational evaluate(const GradedClass& v) const;

  // Parameters when built by exp_charge; reporting only.
  std::optional<std::pair<Rational, Rational>> exp_params;

 private:
  GradedClass kernel_;
};

/// Z^{w,b} = -integrate(exp(-(b + i w) H) * ch). Requires w > 0.
KernelCharge exp_charge(const SpacePtr& space, const Rational& w, const Rational& b);

/// Rational-linear functional f(v) = integrate(dual * v).
struct LinearFunctional {
  GradedClass dual;
  GaussianRational operator()(const GradedClass& v) const { return integrate(dual * v); }
};

struct AbcdFunctionals {
  SpacePtr space;             // X x C, with C the last factor
  std::size_t fiber_factor;   // index of C
  LinearFunctional a, b, c, d;
};

/// Symbolic extraction: with l the point class of C (l^2 = 0),
///   a + i c = -integrate(p^*K * l * v),
///   b + i d = -integrate(p^*K * (1 + (1 - g) l) * v).
AbcdFunctionals extract_abcd(const KernelCharge& base, const CurveFactor& fiber);

struct AbcdCheck {
  bool holds = true;
  std::optional<Monomial> witness;
  long n = 0;
};

/// Independent route: evaluates Z_base(grr_proj_pushforward(ch(E (x) L^n)))
/// and compares with (a + i c) n + (b + i d) on every basis monomial.
AbcdCheck verify_abcd(const AbcdFunctionals& abcd, const KernelCharge& base, std::span<const long> ns);

class LiuCharge {
 public:
  /// s, t > 0.
  LiuCharge(AbcdFunctionals abcd, Rational s, Rational t, Rational beta);

  const SpacePtr& space() const { return abcd_.space; }
  const AbcdFunctionals& abcd() const { return abcd_; }
  const Rational& s() const { return s_; }
  const Rational& t() const { return t_; }
  const Rational& beta() const { return beta_; }

  GaussianRational evaluate(const GradedClass& v) const;
  /// Class K with evaluate(v) = -integrate(K * v).
  GradedClass kernel() const;

 private:
  AbcdFunctionals abcd_;
  Rational s_, t_, beta_;
};

inline LiuCharge liu_charge(AbcdFunctionals abcd, Rational s, Rational t, Rational beta) {
  return LiuCharge(std::move(abcd), std::move(s), std::move(t), std::move(beta));
}

using Charge = std::variant<KernelCharge, LiuCharge>;

GaussianRational evaluate(const Charge& z, const GradedClass& v);
const SpacePtr& charge_space(const Charge& z);
/// Kernel form of any charge: evaluate(v) = -integrate(kernel * v).
GradedClass charge_kernel(const Charge& z);

Json charge_to_json(const Charge& z);

/// Tilt slope nu_{t,beta}; nullopt stands for +infinity (c(v) = 0).
std::optional<Rational> tilt_slope(const AbcdFunctionals& abcd, const Rational& t, const Rational& beta,
                                   const GradedClass& v);

struct TorsionSide {
  std::optional<Rational> slope;
  bool torsion_side = false;  // slope > 0 (or +infinity)
};

/// Slope-sign report only; says nothing about membership in a heart.
std::vector<TorsionSide> torsion_pair_report(const AbcdFunctionals& abcd, const Rational& t,
                                             const Rational& beta, std::span<const GradedClass> classes);

struct PositivityEntry {
  Rational a, b, c, d;
  bool c_nonnegative = true;
  bool d_nonnegative_if_c_zero = true;
  bool a_nonpositive_if_c_zero = true;
  bool ok() const { return c_nonnegative && d_nonnegative_if_c_zero && a_nonpositive_if_c_zero; }
};

struct PositivityReport {
  bool pass = true;
  std::vector<PositivityEntry> entries;
};

/// c >= 0, and c = 0 implies d >= 0 and a <= 0. Classes must be rational.
PositivityReport weak_positivity_report(const AbcdFunctionals& abcd, std::span<const GradedClass> classes);

struct InductionReport {
  bool holds = false;
  Rational shift;     // solves 1 - g + shift = -b unless overridden
  Rational liu_beta;  // parameter handed to the Liu charge
  std::size_t checked = 0;
  std::optional<Monomial> witness;
  GaussianRational liu_value, exp_value;  // at the witness
};

/// Builds Z_k^{w,b} on the first genera.size()-1 curves, extends over the last
/// curve with s = t = w, and compares with Z_{k+1}^{w,b} on the full basis.
/// The collapse computation adds shift * (a + i c) to the extended charge,
/// which is the Liu charge with beta = -shift.
InductionReport verify_induction_identity(const Rational& w, const Rational& b, const std::vector<int>& genera,
                                          std::optional<Rational> shift_override = std::nullopt);
/// k elliptic factors extended by one more elliptic factor.
InductionReport verify_induction_identity(const Rational& w, const Rational& b, std::size_t k,
                                          std::optional<Rational> shift_override = std::nullopt);

struct CompatibilityReport {
  bool holds = true;
  std::size_t checked = 0;
  std::optional<Monomial> witness;  // base monomial
  GaussianRational ambient_value, base_value;
};

/// Z_ambient(i_* v) = Z_base(v) for every base basis monomial.
CompatibilityReport numerical_compatibility_check(const Charge& ambient, const Charge& base,
                                                  const FiberInclusionSpec& inclusion);

// Harder-Narasimhan polygons.

struct HNFactor {
  GradedClass cls;
  long shift = 0;  // the factor is E[shift]; its charge is (-1)^shift Z(E)
};

/// Exact comparison of phase(z1) + s1 with phase(z2) + s2 where each z lies in
/// the half-plane {Im > 0} u R_{<0} (phase in (0, 1]). Returns -1, 0, 1.
int compare_phase(const GaussianRational& z1, long s1, const GaussianRational& z2, long s2);
bool in_principal_half_plane(const GaussianRational& z);

struct HNSegment {
  std::vector<std::size_t> factors;  // input indices sharing this phase
  GaussianRational base_charge;       // Z of one representative, before shifting
  long shift = 0;
  GaussianRational charge;            // summed contribution
};

struct HNPolygon {
  std::vector<HNSegment> segments;          // strictly decreasing phase
  std::vector<GaussianRational> vertices;   // 0, partial sums ..., total
  bool concave = true;
  bool single_factor = false;
};

HNPolygon hn_polygon(const Charge& z, std::span<const HNFactor> factors);

/// Partial sums 0, z_0, z_0 + z_1, ...
std::vector<GaussianRational> path_vertices(std::span<const GaussianRational> steps);

/// Every point lies weakly to the right of every edge line of the polygon.
bool weakly_dominates(const HNPolygon& polygon, std::span<const GaussianRational> points);

}  // namespace stabforge

#pragma once

// Stage-by-stage audit of the Z/2 and Z/3 Cynk-Hulek towers
//   X_n = Hilb^{G_n^+}(X_{n-1} x C_n).
// A stage records the fixed locus of the odd action on X_n as strata with
// their tangent signatures; a step derives the even-action fixed strata on
// X_n x C_{n+1}, classifies the clusters over them, checks the SL and BKR
// dimension conditions, and assembles the odd-action strata of X_{n+1}.

#include "stabforge/class_json.hpp"
#include "stabforge/cohomology.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stabforge {

/// Tangent eigenvalues zeta^e, stored as a sorted multiset of e mod m.
struct TangentSignature {
  int m = 2;
  std::vector<int> exponents;

  TangentSignature() = default;
  TangentSignature(int m, std::vector<int> exponents);
  /// zeros(count) followed by the given nonzero exponents.
  static TangentSignature padded(int m, std::size_t n, std::vector<int> nonzero);

  std::size_t n() const { return exponents.size(); }
  std::size_t codim() const;
  std::vector<int> nonzero() const;
  /// Appends one exponent and re-sorts.
  TangentSignature with(int e) const;
  std::string str() const;  // e.g. "diag(1,1,z^2,z^2)"
  friend bool operator==(const TangentSignature&, const TangentSignature&) = default;
};

Json signature_to_json(const TangentSignature& s);

/// Exponent sum is 0 mod m.
bool sl_condition(const TangentSignature& sig);

struct Piece {
  std::string family;       // B1o, B1', B1'', B2o, B2', B2dagger, or a Z/2 analogue
  std::string description;
  std::size_t dim = 0;
  TangentSignature sig;
  std::optional<long> components;  // counting mode only
};

struct Stratum {
  std::string label;  // "B1" or "B2"
  std::size_t dim = 0;
  TangentSignature sig;
  std::vector<Piece> pieces;
};

struct StageState {
  std::size_t n = 1;
  int m = 2;
  std::vector<Stratum> strata;
  bool counting = false;
};

/// Throws StabforgeError when the state violates the stage invariants.
void validate_state(const StageState& s);

/// X_1 = C_1 with the fixed points of -1 (m = 2) or zeta (m = 3).
StageState initial_state(int m, bool counting = false);

/// One generator of a monomial ideal chart: lead - eps * other, or a
/// monomial when other is empty. Exponent vectors index the chart variables.
struct ChartGenerator {
  std::vector<int> lead;
  std::optional<std::vector<int>> other;
};
using IdealChart = std::vector<ChartGenerator>;

/// Substitutes x_i -> zeta^{-t_i} x_i (t = tangent exponents of the acting
/// element on the chart variables), renormalizes each binomial to a monic
/// lead and returns the exponents by which the parameters scale.
std::vector<int> chart_parameter_exponents(const IdealChart& chart, const std::vector<int>& t, int m);

struct InvariantPoint {
  std::string name;  // P_inf, Q_inf, P_0, R_0w, R_inf, line_a, line_b
  std::size_t parameter_dim = 0;  // 1 for the R_0w pencil
  TangentSignature induced;
};

struct ClusterFamily {
  std::string kind;  // "P1", "P_union_Q", "P2"
  std::size_t fiber_dim = 0;
  std::string description;
  std::vector<InvariantPoint> invariant_points;
};

/// Clusters over a fixed point with even-action signature sig. The odd action
/// is taken to act with tangent exponent 1 on the last listed coordinate (the
/// new curve) and trivially elsewhere.
ClusterFamily classify_clusters(const TangentSignature& sig);

/// Full induced signature at the named invariant point.
TangentSignature parameter_action(const std::string& family, const TangentSignature& sig);

struct BkrBound {
  std::size_t computed = 0;
  std::size_t bound = 0;
  bool pass = false;
};

struct EvenStratum {
  std::string source;  // odd stratum of the previous stage
  std::size_t dim = 0;
  TangentSignature sig;
  bool sl = false;
  ClusterFamily clusters;
  std::size_t contribution = 0;  // dim + 2 * fiber_dim
};

/// computed = max(n, max(dim + 2 fiber_dim)), bound = n + 1.
BkrBound bkr_dimension_bound(std::size_t n, const std::vector<EvenStratum>& strata);

struct ClaimCheck {
  std::string point;
  TangentSignature expected;
  TangentSignature computed;
  bool match = false;
};

struct StageAudit {
  std::size_t from_n = 0;  // X_k; the even action lives on X_k x C_{k+1}
  std::vector<EvenStratum> even_strata;
  BkrBound bkr;
  bool dimension_equality = false;  // computed == k + 2
  std::vector<ClaimCheck> claims;
  bool pass = false;
};

struct StepResult {
  StageState next;
  StageAudit audit;
};

StepResult z2_step(const StageState& state);
StepResult z3_step(const StageState& state);

struct Z3ClusterComponent {
  std::string name;        // "P", "Q", "planar"
  std::size_t dim = 0;     // dimension of the component in the cluster fiber
  std::string ideal;       // generic member
  std::vector<int> quotient_characters;  // characters of a monomial basis of O_Z
};

/// Case analysis for sig with nonzero part {1, 2}: enumerates equivariant
/// colength-3 ideals of C[x1,x2]/(x1,x2)^3 whose quotient is the regular
/// representation.
std::vector<Z3ClusterComponent> enumerate_z3_clusters(const TangentSignature& sig);

struct Tower {
  int m = 2;
  std::vector<StageState> stages;  // X_1 ... X_depth
  std::vector<StageAudit> audits;  // step k -> k+1
  bool pass = true;
};

/// m = 2 or 3; m = 4 is rejected because the BKR dimension condition fails.
Tower run_tower(int m, std::size_t depth, bool counting = false);

Json stage_to_json(const StageState& s);
Json audit_to_json(const StageAudit& a);
Json tower_to_json(const Tower& t);

}  // namespace stabforge

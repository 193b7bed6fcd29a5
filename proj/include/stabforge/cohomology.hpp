#pragma once

// Rational cohomology of a product of smooth projective curves.
//
// Each curve factor C of genus g contributes the basis {1, e_1..e_2g, pt}
// with e_i e_j = J_ij pt for the standard block symplectic form
// J = diag([[0,1],[-1,0]], ...). A Kunneth monomial is an ordered product
// u_1 u_2 ... u_n with u_k drawn from factor k ("factor-major" order); every
// sign in the library is relative to this order.

#include "stabforge/gaussian_rational.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stabforge {

class StabforgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CurveFactor {
  std::string name;
  int genus = 1;
  // Permutations may only exchange factors with the same iso_class.
  std::string iso_class;

  friend bool operator==(const CurveFactor&, const CurveFactor&) = default;
};

class ProductSpace {
 public:
  explicit ProductSpace(std::vector<CurveFactor> factors);

  /// n elliptic curves E1..En declared mutually isomorphic.
  static std::shared_ptr<const ProductSpace> elliptic(std::size_t n);
  /// One curve per genus, names C1..Cn, pairwise non-isomorphic.
  static std::shared_ptr<const ProductSpace> from_genera(const std::vector<int>& genera);

  std::size_t dimension() const { return factors_.size(); }
  int top_degree() const { return 2 * static_cast<int>(factors_.size()); }
  const CurveFactor& factor(std::size_t i) const { return factors_.at(i); }
  const std::vector<CurveFactor>& factors() const { return factors_; }

  friend bool operator==(const ProductSpace&, const ProductSpace&) = default;

 private:
  std::vector<CurveFactor> factors_;
};

using SpacePtr = std::shared_ptr<const ProductSpace>;

/// Same ambient space (pointer identity or equal factor lists).
bool same_space(const SpacePtr& a, const SpacePtr& b);
void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where);

/// Per-factor basis code: 0 = unit, 1..2g = e_j, kPoint = point class.
class Monomial {
 public:
  static constexpr std::uint8_t kUnit = 0;
  static constexpr std::uint8_t kPoint = 0xFF;

  Monomial() = default;
  explicit Monomial(std::size_t factors) : codes_(factors, kUnit) {}
  explicit Monomial(std::vector<std::uint8_t> codes) : codes_(std::move(codes)) {}

  std::size_t size() const { return codes_.size(); }
  std::uint8_t operator[](std::size_t i) const { return codes_[i]; }
  void set(std::size_t i, std::uint8_t code) { codes_[i] = code; }
  const std::vector<std::uint8_t>& codes() const { return codes_; }

  int degree() const;
  /// Number of degree-1 entries.
  int parity() const;

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;

 private:
  std::vector<std::uint8_t> codes_;
};

inline int code_degree(std::uint8_t code) {
  return code == Monomial::kUnit ? 0 : code == Monomial::kPoint ? 2 : 1;
}

std::string code_symbol(std::uint8_t code);
/// Inverse of code_symbol, validated against the factor genus.
std::uint8_t parse_code(const std::string& symbol, int genus);

/// Product in the symplectic multiplication table of one curve:
/// returns {coefficient in {-1,0,1}, code}.
std::pair<int, std::uint8_t> multiply_codes(std::uint8_t a, std::uint8_t b);

struct SignedMonomial {
  int sign = 0;  // 0 means the product vanishes
  Monomial monomial;
};

/// Product of two canonical monomials, Koszul and symplectic signs included.
SignedMonomial multiply(const Monomial& a, const Monomial& b);

/// One generator u^{(factor)} of an arbitrary ordered word.
struct Generator {
  std::size_t factor = 0;
  std::uint8_t code = Monomial::kUnit;
};

/// Canonical signed monomial of an ordered product of generators.
SignedMonomial normalize_word(std::size_t factors, std::span<const Generator> word);

/// Every monomial of the Kunneth basis, ascending in canonical order.
std::vector<Monomial> monomial_basis(const ProductSpace& space);
/// Monomials of total degree d.
std::vector<Monomial> monomial_basis(const ProductSpace& space, int degree);

/// Sparse element of H*(C_1 x ... x C_n; Q + iQ). Zero coefficients are never stored.
class GradedClass {
 public:
  using Terms = std::map<Monomial, GaussianRational>;

  explicit GradedClass(SpacePtr space);

  static GradedClass zero(SpacePtr space) { return GradedClass(std::move(space)); }
  static GradedClass unit(SpacePtr space);
  static GradedClass monomial(SpacePtr space, Monomial m, GaussianRational c = 1);
  static GradedClass point(SpacePtr space, std::size_t factor);
  static GradedClass odd(SpacePtr space, std::size_t factor, int index);
  static GradedClass top(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  GaussianRational coefficient(const Monomial& m) const;
  void add_term(const Monomial& m, const GaussianRational& c);

  GradedClass degree_part(int degree) const;
  /// True when every stored monomial has degree d.
  bool is_homogeneous(int degree) const;
  bool has_rational_coefficients() const;

  GradedClass& operator+=(const GradedClass& o);
  GradedClass& operator-=(const GradedClass& o);
  GradedClass& operator*=(const GaussianRational& c);

  friend GradedClass operator+(GradedClass a, const GradedClass& b) { return a += b; }
  friend GradedClass operator-(GradedClass a, const GradedClass& b) { return a -= b; }
  friend GradedClass operator*(GradedClass a, const GaussianRational& c) { return a *= c; }
  friend GradedClass operator*(const GaussianRational& c, GradedClass a) { return a *= c; }
  GradedClass operator-() const { return *this * GaussianRational(-1); }
  /// Cup product; see wedge().
  friend GradedClass operator*(const GradedClass& a, const GradedClass& b);

  friend bool operator==(const GradedClass& a, const GradedClass& b);

  std::string str() const;

 private:
  SpacePtr space_;
  Terms terms_;
};

GradedClass wedge(const GradedClass& u, const GradedClass& v);

/// Coefficient of pt^(1) ... pt^(n); the top class integrates to 1.
GaussianRational integrate(const GradedClass& v);

/// sum_k v^k / k!, for v with only even components of degree >= 2.
GradedClass exp_nilpotent(const GradedClass& v);

/// H = pt^(1) + ... + pt^(n), the class of the degree-1 polarization on each factor.
GradedClass hyperplane_class(const SpacePtr& space);

}  // namespace stabforge

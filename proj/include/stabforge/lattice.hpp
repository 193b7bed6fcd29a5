#pragma once

// Exact integer lattices: column Hermite normal form, integer kernels,
// saturation, and lattice maps between labelled bases.

#include "stabforge/class_json.hpp"
#include "stabforge/cohomology.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace stabforge {

using Integer = mpz_class;

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Integer& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool is_zero() const;
  bool column_is_zero(std::size_t c) const;
  IntMatrix transpose() const;
  /// Columns [first, first + count).
  IntMatrix columns(std::size_t first, std::size_t count) const;
  /// Places the columns of other after those of *this (row counts must agree).
  IntMatrix hconcat(const IntMatrix& other) const;
  /// Places the rows of other below those of *this (column counts must agree).
  IntMatrix vconcat(const IntMatrix& other) const;

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

  Json to_json() const;
  std::string str() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Integer> data_;
};

struct HnfResult {
  IntMatrix h;          // h = m * u
  IntMatrix u;          // unimodular
  std::size_t rank = 0; // nonzero columns of h are exactly the first rank ones
};

/// Column Hermite normal form: pivot rows strictly increase, pivots are
/// positive, entries left of a pivot lie in [0, pivot), entries right of it
/// vanish. Zero columns are moved to the end; the shape is kept.
HnfResult column_hnf(const IntMatrix& m);
IntMatrix hermite_normal_form(const IntMatrix& m);

/// Columns form a Z-basis of {x in Z^cols : m x = 0}.
IntMatrix integer_kernel(const IntMatrix& m);
/// Z-basis (in HNF) of (span_Q of the columns) intersected with Z^rows.
IntMatrix saturate(const IntMatrix& basis);
/// Rank over Q.
std::size_t rank(const IntMatrix& m);
/// [Z^rows : column span] when the columns have full row rank; nullopt otherwise.
std::optional<Integer> lattice_index(const IntMatrix& m);

/// A linear map between free abelian groups (or Q-spans of labelled classes).
/// Column j holds the image of source basis element j divided by denominator.
struct LatticeMap {
  IntMatrix matrix;
  Integer denominator = 1;
  std::vector<std::string> source_labels;
  std::vector<std::string> target_labels;

  std::size_t rank() const { return stabforge::rank(matrix); }
  Json to_json() const;
};

/// Column HNF of the map's matrix; the source labels become h1, h2, ...
LatticeMap hermite_normal_form(const LatticeMap& m);
/// HNF basis of the image (nonzero HNF columns only), optionally saturated.
LatticeMap image_lattice(const LatticeMap& m, bool saturated = false);

/// Coordinates of classes with respect to a linearly independent list of
/// classes with rational coefficients.
class ClassCoordinates {
 public:
  explicit ClassCoordinates(std::vector<GradedClass> basis);
  const std::vector<GradedClass>& basis() const { return basis_; }
  std::size_t size() const { return basis_.size(); }
  /// nullopt when v is not in the Q-span of the basis.
  std::optional<std::vector<Rational>> solve(const GradedClass& v) const;
  GradedClass combine(const std::vector<Rational>& coords) const;

 private:
  std::vector<GradedClass> basis_;
  std::vector<Monomial> pivots_;                // one monomial per basis element
  std::vector<std::vector<Rational>> inverse_;  // inverse of the pivot block
};

/// Integer matrix D * A for the least common denominator D of the entries of
/// A (given as a list of columns of length rows).
IntMatrix clear_denominators(const std::vector<std::vector<Rational>>& columns, std::size_t rows,
                             Integer* common = nullptr);

std::string monomial_label(const ProductSpace& space, const Monomial& m);

}  // namespace stabforge

#include "stabforge/lattice.hpp"

#include <algorithm>
#include <sstream>

namespace stabforge {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  for (const auto& r : rows) {
    if (r.size() != cols_) throw StabforgeError("ragged integer matrix");
    for (long x : r) data_.emplace_back(x);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Integer& x) { return x == 0; });
}

bool IntMatrix::column_is_zero(std::size_t c) const {
  for (std::size_t r = 0; r < rows_; ++r)
    if (at(r, c) != 0) return false;
  return true;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
  return t;
}

IntMatrix IntMatrix::columns(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw StabforgeError("column range out of bounds");
  IntMatrix out(rows_, count);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < count; ++c) out.at(r, c) = at(r, first + c);
  return out;
}

IntMatrix IntMatrix::hconcat(const IntMatrix& other) const {
  if (rows_ != other.rows_) throw StabforgeError("hconcat: row counts differ");
  IntMatrix out(rows_, cols_ + other.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out.at(r, c) = at(r, c);
    for (std::size_t c = 0; c < other.cols_; ++c) out.at(r, cols_ + c) = other.at(r, c);
  }
  return out;
}

IntMatrix IntMatrix::vconcat(const IntMatrix& other) const {
  if (cols_ != other.cols_) throw StabforgeError("vconcat: column counts differ");
  IntMatrix out(rows_ + other.rows_, cols_);
  for (std::size_t c = 0; c < cols_; ++c) {
    for (std::size_t r = 0; r < rows_; ++r) out.at(r, c) = at(r, c);
    for (std::size_t r = 0; r < other.rows_; ++r) out.at(rows_ + r, c) = other.at(r, c);
  }
  return out;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols_ != b.rows_) throw StabforgeError("matrix product: shape mismatch");
  IntMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Integer& x = a.at(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out.at(i, j) += x * b.at(k, j);
    }
  return out;
}

Json IntMatrix::to_json() const {
  Json rows = Json::array();
  for (std::size_t r = 0; r < rows_; ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < cols_; ++c) {
      const Integer& x = at(r, c);
      if (x.fits_slong_p())
        row.push_back(x.get_si());
      else
        row.push_back(x.get_str());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string IntMatrix::str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t r = 0; r < rows_; ++r) {
    os << (r ? ", [" : "[");
    for (std::size_t c = 0; c < cols_; ++c) os << (c ? ", " : "") << at(r, c).get_str();
    os << "]";
  }
  os << "]";
  return os.str();
}

namespace {

// Column operations applied to h and mirrored on u.
struct ColumnOps {
  IntMatrix& h;
  IntMatrix& u;

  void swap(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < h.rows(); ++r) std::swap(h.at(r, a), h.at(r, b));
    for (std::size_t r = 0; r < u.rows(); ++r) std::swap(u.at(r, a), u.at(r, b));
  }
  void negate(std::size_t a) {
    for (std::size_t r = 0; r < h.rows(); ++r) h.at(r, a) = -h.at(r, a);
    for (std::size_t r = 0; r < u.rows(); ++r) u.at(r, a) = -u.at(r, a);
  }
  // col[b] -= k * col[a]
  void axpy(std::size_t b, const Integer& k, std::size_t a) {
    if (k == 0) return;
    for (std::size_t r = 0; r < h.rows(); ++r) h.at(r, b) -= k * h.at(r, a);
    for (std::size_t r = 0; r < u.rows(); ++r) u.at(r, b) -= k * u.at(r, a);
  }
  // (col a, col b) <- (x col a + y col b, -q col a + p col b) for x p + y q = 1
  void combine(std::size_t a, std::size_t b, const Integer& x, const Integer& y, const Integer& p,
               const Integer& q) {
    auto apply = [&](IntMatrix& m) {
      for (std::size_t r = 0; r < m.rows(); ++r) {
        Integer ca = m.at(r, a), cb = m.at(r, b);
        m.at(r, a) = x * ca + y * cb;
        m.at(r, b) = -q * ca + p * cb;
      }
    };
    apply(h);
    apply(u);
  }
};

}  // namespace

HnfResult column_hnf(const IntMatrix& m) {
  HnfResult res{m, IntMatrix::identity(m.cols()), 0};
  ColumnOps ops{res.h, res.u};
  std::size_t pivot_col = 0;
  const std::size_t n = m.cols();
  for (std::size_t r = 0; r < m.rows() && pivot_col < n; ++r) {
    // Fold every column right of pivot_col into pivot_col via extended gcd.
    for (std::size_t c = pivot_col + 1; c < n; ++c) {
      const Integer b = res.h.at(r, c);
      if (b == 0) continue;
      const Integer a = res.h.at(r, pivot_col);
      Integer g, x, y;
      mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
      // x a + y b = g; the second column becomes (-b/g) a + (a/g) b, zero in row r.
      Integer p = a / g, q = b / g;
      ops.combine(pivot_col, c, x, y, p, q);
    }
    if (res.h.at(r, pivot_col) == 0) continue;
    if (res.h.at(r, pivot_col) < 0) ops.negate(pivot_col);
    const Integer pivot = res.h.at(r, pivot_col);
    for (std::size_t c = 0; c < pivot_col; ++c) {
      Integer k;
      mpz_fdiv_q(k.get_mpz_t(), res.h.at(r, c).get_mpz_t(), pivot.get_mpz_t());
      ops.axpy(c, k, pivot_col);
    }
    ++pivot_col;
  }
  res.rank = pivot_col;
  return res;
}

IntMatrix hermite_normal_form(const IntMatrix& m) { return column_hnf(m).h; }

IntMatrix integer_kernel(const IntMatrix& m) {
  HnfResult r = column_hnf(m);
  return r.u.columns(r.rank, m.cols() - r.rank);
}

IntMatrix saturate(const IntMatrix& basis) {
  // (span_Q L) cap Z^n is the integer kernel of the integer annihilator of L.
  IntMatrix annihilator = integer_kernel(basis.transpose()).transpose();
  if (annihilator.rows() == 0) return IntMatrix::identity(basis.rows());
  IntMatrix sat = integer_kernel(annihilator);
  return hermite_normal_form(sat);
}

std::size_t rank(const IntMatrix& m) { return column_hnf(m).rank; }

std::optional<Integer> lattice_index(const IntMatrix& m) {
  HnfResult r = column_hnf(m);
  if (r.rank != m.rows()) return std::nullopt;
  Integer idx = 1;
  for (std::size_t k = 0; k < r.rank; ++k) idx *= r.h.at(k, k);
  return idx;
}

Json LatticeMap::to_json() const {
  Json j;
  j["matrix"] = matrix.to_json();
  j["denominator"] = denominator.get_str();
  j["source"] = source_labels;
  j["target"] = target_labels;
  j["rank"] = rank();
  return j;
}

LatticeMap hermite_normal_form(const LatticeMap& m) {
  LatticeMap out = m;
  out.matrix = hermite_normal_form(m.matrix);
  out.source_labels.clear();
  for (std::size_t c = 0; c < out.matrix.cols(); ++c) out.source_labels.push_back("h" + std::to_string(c + 1));
  return out;
}

LatticeMap image_lattice(const LatticeMap& m, bool saturated) {
  HnfResult r = column_hnf(m.matrix);
  IntMatrix basis = r.h.columns(0, r.rank);
  if (saturated) basis = saturate(basis).columns(0, r.rank);
  LatticeMap out;
  out.matrix = std::move(basis);
  out.denominator = m.denominator;
  out.target_labels = m.target_labels;
  for (std::size_t c = 0; c < r.rank; ++c) out.source_labels.push_back("b" + std::to_string(c + 1));
  return out;
}

ClassCoordinates::ClassCoordinates(std::vector<GradedClass> basis) : basis_(std::move(basis)) {
  const std::size_t k = basis_.size();
  if (k == 0) return;
  for (const auto& b : basis_) {
    require_same_space(basis_.front().space(), b.space(), "ClassCoordinates");
    if (!b.has_rational_coefficients()) throw StabforgeError("basis classes must have rational coefficients");
  }
  // Gauss-Jordan on the k x (#monomials) matrix of coefficients, tracking the
  // row transform T so that T * B restricted to the pivot monomials is I.
  std::vector<Monomial> monos;
  for (const auto& b : basis_)
    for (const auto& [m, c] : b.terms()) monos.push_back(m);
  std::sort(monos.begin(), monos.end());
  monos.erase(std::unique(monos.begin(), monos.end()), monos.end());

  std::vector<std::vector<Rational>> rows(k, std::vector<Rational>(monos.size()));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < monos.size(); ++j) rows[i][j] = basis_[i].coefficient(monos[j]).re();
  std::vector<std::vector<Rational>> t(k, std::vector<Rational>(k));
  for (std::size_t i = 0; i < k; ++i) t[i][i] = 1;

  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < monos.size() && row < k; ++col) {
    std::size_t sel = row;
    while (sel < k && sgn(rows[sel][col]) == 0) ++sel;
    if (sel == k) continue;
    std::swap(rows[sel], rows[row]);
    std::swap(t[sel], t[row]);
    Rational inv = 1 / rows[row][col];
    for (auto& x : rows[row]) x *= inv;
    for (auto& x : t[row]) x *= inv;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == row || sgn(rows[i][col]) == 0) continue;
      Rational f = rows[i][col];
      for (std::size_t j = 0; j < monos.size(); ++j) rows[i][j] -= f * rows[row][j];
      for (std::size_t j = 0; j < k; ++j) t[i][j] -= f * t[row][j];
    }
    pivot_cols.push_back(col);
    ++row;
  }
  if (row < k) throw StabforgeError("basis classes are linearly dependent");
  // Row i of rows equals sum_j t[i][j] basis_j, and has a 1 at pivot i, 0 at
  // other pivots. For v = sum_j x_j basis_j, coefficient of v at pivot i is
  // sum_j x_j B_j(p_i); so x = (B_P)^{-1} v_P with (B_P)^{-1} = t^T.
  for (auto c : pivot_cols) pivots_.push_back(monos[c]);
  inverse_.assign(k, std::vector<Rational>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) inverse_[j][i] = t[i][j];
}

std::optional<std::vector<Rational>> ClassCoordinates::solve(const GradedClass& v) const {
  const std::size_t k = basis_.size();
  if (k == 0) {
    if (v.is_zero()) return std::vector<Rational>{};
    return std::nullopt;
  }
  require_same_space(basis_.front().space(), v.space(), "ClassCoordinates::solve");
  if (!v.has_rational_coefficients()) return std::nullopt;
  std::vector<Rational> vp(k);
  for (std::size_t i = 0; i < k; ++i) vp[i] = v.coefficient(pivots_[i]).re();
  std::vector<Rational> x(k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i)
      if (sgn(vp[i]) != 0) x[j] += inverse_[j][i] * vp[i];
  if (!(combine(x) == v)) return std::nullopt;
  return x;
}

GradedClass ClassCoordinates::combine(const std::vector<Rational>& coords) const {
  if (coords.size() != basis_.size()) throw StabforgeError("coordinate vector has wrong length");
  if (basis_.empty()) throw StabforgeError("empty basis has no ambient space");
  GradedClass out(basis_.front().space());
  for (std::size_t j = 0; j < coords.size(); ++j)
    if (sgn(coords[j]) != 0) out += basis_[j] * GaussianRational(coords[j]);
  return out;
}

IntMatrix clear_denominators(const std::vector<std::vector<Rational>>& columns, std::size_t rows,
                             Integer* common) {
  Integer d = 1;
  for (const auto& col : columns)
    for (const auto& x : col) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
  IntMatrix out(rows, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != rows) throw StabforgeError("column has wrong length");
    for (std::size_t r = 0; r < rows; ++r) {
      Rational scaled = columns[c][r] * Rational(d);
      scaled.canonicalize();
      out.at(r, c) = scaled.get_num();
    }
  }
  if (common) *common = d;
  return out;
}

std::string monomial_label(const ProductSpace& space, const Monomial& m) {
  std::string s;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] == Monomial::kUnit) continue;
    if (!s.empty()) s += "*";
    s += code_symbol(m[k]) + "_" + space.factor(k).name;
  }
  return s.empty() ? "1" : s;
}

}  // namespace stabforge

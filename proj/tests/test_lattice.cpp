#include "stabforge/lattice.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace stabforge;

namespace {

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, long bound = 6) {
  std::uniform_int_distribution<long> d(-bound, bound);
  IntMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = d(rng);
  return m;
}

IntMatrix random_unimodular(std::mt19937_64& rng, std::size_t n) {
  IntMatrix u = IntMatrix::identity(n);
  if (n < 2) return u;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<long> k(-3, 3);
  for (int step = 0; step < 12; ++step) {
    std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    IntMatrix e = IntMatrix::identity(n);
    e.at(a, b) = k(rng);
    u = u * e;
  }
  // a column swap and a sign change for good measure
  IntMatrix p = IntMatrix::identity(n);
  std::swap(p.at(0, 0), p.at(1, 0));
  std::swap(p.at(0, 1), p.at(1, 1));
  p.at(0, 0) = -p.at(0, 0);
  p.at(1, 0) = -p.at(1, 0);
  return u * p;
}

// Structural HNF conditions, checked directly on the entries.
bool is_column_hnf(const IntMatrix& h) {
  std::size_t prev_row = 0;
  bool first = true;
  bool zero_seen = false;
  for (std::size_t c = 0; c < h.cols(); ++c) {
    std::size_t r = 0;
    while (r < h.rows() && h.at(r, c) == 0) ++r;
    if (r == h.rows()) {
      zero_seen = true;
      continue;
    }
    if (zero_seen) return false;
    if (!first && r <= prev_row) return false;
    if (h.at(r, c) <= 0) return false;
    for (std::size_t left = 0; left < c; ++left)
      if (h.at(r, left) < 0 || h.at(r, left) >= h.at(r, c)) return false;
    first = false;
    prev_row = r;
  }
  return true;
}

// Solves h x = v for integer x by forward substitution on the pivot rows.
bool integral_in_span(const IntMatrix& h, std::vector<Integer> v) {
  for (std::size_t c = 0; c < h.cols(); ++c) {
    std::size_t r = 0;
    while (r < h.rows() && h.at(r, c) == 0) ++r;
    if (r == h.rows()) break;
    if (v[r] % h.at(r, c) != 0) return false;
    Integer x = v[r] / h.at(r, c);
    for (std::size_t k = 0; k < h.rows(); ++k) v[k] -= x * h.at(k, c);
  }
  return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
}

std::vector<Integer> column(const IntMatrix& m, std::size_t c) {
  std::vector<Integer> v;
  for (std::size_t r = 0; r < m.rows(); ++r) v.push_back(m.at(r, c));
  return v;
}

Integer det(IntMatrix m) {
  // Bareiss fraction-free elimination.
  const std::size_t n = m.rows();
  Integer sign = 1, prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m.at(p, k) == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m.at(p, c), m.at(k, c));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
    prev = m.at(k, k);
  }
  return sign * m.at(n - 1, n - 1);
}

}  // namespace

TEST_CASE("hermite normal form examples") {
  CHECK(hermite_normal_form(IntMatrix{{2, 4}, {0, 2}}) == IntMatrix{{2, 0}, {0, 2}});
  CHECK(hermite_normal_form(IntMatrix::identity(3)) == IntMatrix::identity(3));
  CHECK(hermite_normal_form(IntMatrix(2, 3)) == IntMatrix(2, 3));
  CHECK(hermite_normal_form(IntMatrix{{3, 5}}) == IntMatrix{{1, 0}});
  CHECK(hermite_normal_form(IntMatrix{{0, 0}, {4, 6}}) == IntMatrix{{0, 0}, {2, 0}});
  CHECK(hermite_normal_form(IntMatrix{{1, 0}, {5, 3}}) == IntMatrix{{1, 0}, {2, 3}});
}

TEST_CASE("kernel, saturation, index") {
  auto k = integer_kernel(IntMatrix{{1, 2, 3}});
  CHECK(k.cols() == 2);
  CHECK((IntMatrix{{1, 2, 3}} * k).is_zero());
  CHECK(integer_kernel(IntMatrix::identity(2)).cols() == 0);
  CHECK(saturate(IntMatrix{{2}, {0}}) == IntMatrix{{1}, {0}});
  CHECK(saturate(IntMatrix{{2}, {4}}) == IntMatrix{{1}, {2}});
  CHECK(*lattice_index(IntMatrix{{2, 0}, {0, 3}}) == 6);
  CHECK_FALSE(lattice_index(IntMatrix{{2}, {0}}).has_value());
  CHECK(rank(IntMatrix{{1, 2}, {2, 4}}) == 1);
}

TEST_CASE("image lattice keeps the index unless saturated") {
  LatticeMap m{IntMatrix{{2, 0}, {0, 1}, {0, 0}}, 1, {"x", "y"}, {"a", "b", "c"}};
  auto img = image_lattice(m);
  CHECK(img.matrix == IntMatrix{{2, 0}, {0, 1}, {0, 0}});
  auto sat = image_lattice(m, true);
  CHECK(sat.matrix == IntMatrix{{1, 0}, {0, 1}, {0, 0}});
  LatticeMap surj{IntMatrix{{1, 1}, {0, 1}}, 1, {"x", "y"}, {"a", "b"}};
  CHECK(image_lattice(surj).matrix == IntMatrix::identity(2));
  CHECK(image_lattice(m).to_json()["rank"] == 2);
}

TEST_CASE("property: column HNF structure and span") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t rows = 1 + trial % 5, cols = 1 + (trial / 5) % 5;
    auto m = random_matrix(rng, rows, cols, trial % 3 == 0 ? 2 : 6);
    auto res = column_hnf(m);
    CHECK(is_column_hnf(res.h));
    CHECK(res.h == m * res.u);
    for (std::size_t c = 0; c < cols; ++c) CHECK(integral_in_span(res.h, column(m, c)));
    if (rows == cols) {
      Integer dm = det(m), dh = det(res.h);
      CHECK(abs(dm) == abs(dh));
      CHECK(abs(det(res.u)) == 1);
    }
  }
}

TEST_CASE("property: image lattice is idempotent and invariant under source changes") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t rows = 2 + trial % 4, cols = 2 + (trial / 4) % 4;
    auto m = random_matrix(rng, rows, cols);
    auto h = hermite_normal_form(m);
    CHECK(hermite_normal_form(h) == h);
    CHECK(hermite_normal_form(m * random_unimodular(rng, cols)) == h);
    auto k = integer_kernel(m);
    CHECK((m * k).is_zero());
    CHECK(k.cols() + rank(m) == cols);
    if (k.cols() > 0) CHECK(saturate(k) == hermite_normal_form(k));
  }
}

TEST_CASE("class coordinates") {
  auto e = ProductSpace::elliptic(2);
  std::vector<GradedClass> basis{GradedClass::unit(e) + GradedClass::point(e, 0), GradedClass::point(e, 0)};
  ClassCoordinates cc(basis);
  auto x = cc.solve(GradedClass::unit(e) * GaussianRational(3));
  REQUIRE(x.has_value());
  CHECK((*x)[0] == 3);
  CHECK((*x)[1] == -3);
  CHECK_FALSE(cc.solve(GradedClass::top(e)).has_value());
  CHECK_THROWS_AS(ClassCoordinates({basis[0], basis[0]}), StabforgeError);
}

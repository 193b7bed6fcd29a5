#include "stabforge/cohomology.hpp"

#include <sstream>

namespace stabforge {

ProductSpace::ProductSpace(std::vector<CurveFactor> factors) : factors_(std::move(factors)) {
  for (const auto& f : factors_) {
    if (f.genus < 0) throw StabforgeError("curve factor " + f.name + " has negative genus");
    if (2 * f.genus >= Monomial::kPoint) throw StabforgeError("genus too large for factor " + f.name);
  }
}

std::shared_ptr<const ProductSpace> ProductSpace::elliptic(std::size_t n) {
  std::vector<CurveFactor> fs;
  for (std::size_t i = 0; i < n; ++i) fs.push_back({"E" + std::to_string(i + 1), 1, "E"});
  return std::make_shared<const ProductSpace>(std::move(fs));
}

std::shared_ptr<const ProductSpace> ProductSpace::from_genera(const std::vector<int>& genera) {
  std::vector<CurveFactor> fs;
  for (std::size_t i = 0; i < genera.size(); ++i) {
    std::string name = "C" + std::to_string(i + 1);
    fs.push_back({name, genera[i], name});
  }
  return std::make_shared<const ProductSpace>(std::move(fs));
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  return a == b || (a && b && *a == *b);
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where) {
  if (!same_space(a, b)) throw StabforgeError(std::string(where) + ": mismatched ambient space");
}

int Monomial::degree() const {
  int d = 0;
  for (auto c : codes_) d += code_degree(c);
  return d;
}

int Monomial::parity() const {
  int p = 0;
  for (auto c : codes_) p += code_degree(c) == 1 ? 1 : 0;
  return p;
}

std::string code_symbol(std::uint8_t code) {
  if (code == Monomial::kUnit) return "1";
  if (code == Monomial::kPoint) return "pt";
  return "e" + std::to_string(code);
}

std::uint8_t parse_code(const std::string& symbol, int genus) {
  if (symbol == "1") return Monomial::kUnit;
  if (symbol == "pt") return Monomial::kPoint;
  if (symbol.size() >= 2 && symbol[0] == 'e') {
    int j = 0;
    try {
      j = std::stoi(symbol.substr(1));
    } catch (const std::exception&) {
      throw StabforgeError("bad basis symbol \"" + symbol + "\"");
    }
    if (j >= 1 && j <= 2 * genus) return static_cast<std::uint8_t>(j);
  }
  throw StabforgeError("basis symbol \"" + symbol + "\" invalid for genus " + std::to_string(genus));
}

std::pair<int, std::uint8_t> multiply_codes(std::uint8_t a, std::uint8_t b) {
  if (a == Monomial::kUnit) return {1, b};
  if (b == Monomial::kUnit) return {1, a};
  if (a == Monomial::kPoint || b == Monomial::kPoint) return {0, Monomial::kUnit};
  // e_a e_b = J_ab pt with J = diag([[0,1],[-1,0]], ...)
  if (a % 2 == 1 && b == a + 1) return {1, Monomial::kPoint};
  if (a % 2 == 0 && b + 1 == a) return {-1, Monomial::kPoint};
  return {0, Monomial::kUnit};
}

SignedMonomial multiply(const Monomial& a, const Monomial& b) {
  const std::size_t n = a.size();
  // Reorder a_1..a_n b_1..b_n into (a_1 b_1)...(a_n b_n): b_k passes a_{k+1..n}.
  int odd_after = 0;
  int swaps = 0;
  for (std::size_t k = n; k-- > 0;) {
    if (code_degree(b[k]) == 1) swaps += odd_after;
    if (code_degree(a[k]) == 1) ++odd_after;
  }
  SignedMonomial out{(swaps % 2 == 0) ? 1 : -1, Monomial(n)};
  for (std::size_t k = 0; k < n; ++k) {
    auto [c, code] = multiply_codes(a[k], b[k]);
    if (c == 0) return {0, Monomial(n)};
    out.sign *= c;
    out.monomial.set(k, code);
  }
  return out;
}

SignedMonomial normalize_word(std::size_t factors, std::span<const Generator> word) {
  std::vector<Generator> w(word.begin(), word.end());
  int sign = 1;
  // Stable insertion sort by factor; exchanging two odd generators flips the sign.
  for (std::size_t i = 1; i < w.size(); ++i) {
    for (std::size_t j = i; j > 0 && w[j - 1].factor > w[j].factor; --j) {
      if (code_degree(w[j - 1].code) == 1 && code_degree(w[j].code) == 1) sign = -sign;
      std::swap(w[j - 1], w[j]);
    }
  }
  Monomial m(factors);
  for (const auto& g : w) {
    if (g.factor >= factors) throw StabforgeError("generator factor index out of range");
    auto [c, code] = multiply_codes(m[g.factor], g.code);
    if (c == 0) return {0, Monomial(factors)};
    sign *= c;
    m.set(g.factor, code);
  }
  return {sign, m};
}

namespace {

std::vector<std::uint8_t> factor_codes(const CurveFactor& f) {
  std::vector<std::uint8_t> codes{Monomial::kUnit};
  for (int j = 1; j <= 2 * f.genus; ++j) codes.push_back(static_cast<std::uint8_t>(j));
  codes.push_back(Monomial::kPoint);
  return codes;
}

}  // namespace

std::vector<Monomial> monomial_basis(const ProductSpace& space) {
  const std::size_t n = space.dimension();
  std::vector<std::vector<std::uint8_t>> per;
  for (const auto& f : space.factors()) per.push_back(factor_codes(f));
  std::vector<Monomial> out;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    Monomial m(n);
    for (std::size_t k = 0; k < n; ++k) m.set(k, per[k][idx[k]]);
    out.push_back(std::move(m));
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++idx[k] < per[k].size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (n == 0) return out;
  }
}

std::vector<Monomial> monomial_basis(const ProductSpace& space, int degree) {
  std::vector<Monomial> out;
  for (auto& m : monomial_basis(space))
    if (m.degree() == degree) out.push_back(std::move(m));
  return out;
}

GradedClass::GradedClass(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw StabforgeError("graded class without ambient space");
}

GradedClass GradedClass::unit(SpacePtr space) {
  std::size_t n = space->dimension();
  return monomial(std::move(space), Monomial(n));
}

GradedClass GradedClass::monomial(SpacePtr space, Monomial m, GaussianRational c) {
  if (m.size() != space->dimension()) throw StabforgeError("monomial length does not match space");
  GradedClass v(std::move(space));
  v.add_term(m, c);
  return v;
}

GradedClass GradedClass::point(SpacePtr space, std::size_t factor) {
  Monomial m(space->dimension());
  m.set(factor, Monomial::kPoint);
  return monomial(std::move(space), std::move(m));
}

GradedClass GradedClass::odd(SpacePtr space, std::size_t factor, int index) {
  if (index < 1 || index > 2 * space->factor(factor).genus)
    throw StabforgeError("odd generator index out of range");
  Monomial m(space->dimension());
  m.set(factor, static_cast<std::uint8_t>(index));
  return monomial(std::move(space), std::move(m));
}

GradedClass GradedClass::top(SpacePtr space) {
  Monomial m(space->dimension());
  for (std::size_t k = 0; k < m.size(); ++k) m.set(k, Monomial::kPoint);
  return monomial(std::move(space), std::move(m));
}

GaussianRational GradedClass::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? GaussianRational() : it->second;
}

void GradedClass::add_term(const Monomial& m, const GaussianRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

GradedClass GradedClass::degree_part(int degree) const {
  GradedClass out(space_);
  for (const auto& [m, c] : terms_)
    if (m.degree() == degree) out.terms_.emplace(m, c);
  return out;
}

bool GradedClass::is_homogeneous(int degree) const {
  for (const auto& [m, c] : terms_)
    if (m.degree() != degree) return false;
  return true;
}

bool GradedClass::has_rational_coefficients() const {
  for (const auto& [m, c] : terms_)
    if (!c.is_real()) return false;
  return true;
}

GradedClass& GradedClass::operator+=(const GradedClass& o) {
  require_same_space(space_, o.space_, "add");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

GradedClass& GradedClass::operator-=(const GradedClass& o) {
  require_same_space(space_, o.space_, "subtract");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

GradedClass& GradedClass::operator*=(const GaussianRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, x] : terms_) x *= c;
  return *this;
}

GradedClass operator*(const GradedClass& a, const GradedClass& b) { return wedge(a, b); }

bool operator==(const GradedClass& a, const GradedClass& b) {
  return same_space(a.space_, b.space_) && a.terms_ == b.terms_;
}

std::string GradedClass::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")";
    for (std::size_t k = 0; k < m.size(); ++k)
      if (m[k] != Monomial::kUnit) os << "*" << code_symbol(m[k]) << "_" << (k + 1);
  }
  return os.str();
}

GradedClass wedge(const GradedClass& u, const GradedClass& v) {
  require_same_space(u.space(), v.space(), "wedge");
  GradedClass out(u.space());
  for (const auto& [mu, cu] : u.terms()) {
    for (const auto& [mv, cv] : v.terms()) {
      SignedMonomial p = multiply(mu, mv);
      if (p.sign == 0) continue;
      GaussianRational c = cu * cv;
      if (p.sign < 0) c = -c;
      out.add_term(p.monomial, c);
    }
  }
  return out;
}

GaussianRational integrate(const GradedClass& v) {
  return v.coefficient(GradedClass::top(v.space()).terms().begin()->first);
}

GradedClass exp_nilpotent(const GradedClass& v) {
  for (const auto& [m, c] : v.terms()) {
    int d = m.degree();
    if (d == 0 || d % 2 == 1)
      throw StabforgeError("exp_nilpotent: component of degree " + std::to_string(d) +
                           " (need even degree >= 2)");
  }
  GradedClass result = GradedClass::unit(v.space());
  GradedClass power = GradedClass::unit(v.space());
  for (long k = 1; k <= static_cast<long>(v.space()->dimension()); ++k) {
    power = wedge(power, v) * GaussianRational(Rational(1, k));
    if (power.is_zero()) break;
    result += power;
  }
  return result;
}

GradedClass hyperplane_class(const SpacePtr& space) {
  GradedClass h(space);
  for (std::size_t i = 0; i < space->dimension(); ++i) h += GradedClass::point(space, i);
  return h;
}

}  // namespace stabforge

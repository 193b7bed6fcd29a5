#include "stabforge/group_action.hpp"

#include <map>
#include <set>

namespace stabforge {

namespace {

using Mat = std::vector<std::vector<long>>;

Mat mat_identity(std::size_t n) {
  Mat m(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

Mat mat_mul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size();
  Mat c(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Mat symplectic_j(std::size_t n) {
  Mat j(n, std::vector<long>(n, 0));
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    j[k][k + 1] = 1;
    j[k + 1][k] = -1;
  }
  return j;
}

Mat transpose(const Mat& a) {
  Mat t(a.size(), std::vector<long>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) t[j][i] = a[i][j];
  return t;
}

constexpr int kMaxAutOrder = 1000;

}  // namespace

CurveAut identity_aut(int genus) { return {mat_identity(2 * genus), "id"}; }

CurveAut inversion_aut(int genus) {
  CurveAut a{mat_identity(2 * genus), "inv"};
  for (auto& row : a.matrix)
    for (auto& x : row) x = -x;
  return a;
}

CurveAut order3_aut() { return {{{0, -1}, {1, -1}}, "zeta3"}; }

StandardAuts standard_auts() { return {identity_aut(1), inversion_aut(1), order3_aut()}; }

CurveAut compose(const CurveAut& a, const CurveAut& b) {
  if (a.matrix.size() != b.matrix.size()) throw StabforgeError("composing automorphisms of different genus");
  CurveAut c{mat_mul(a.matrix, b.matrix), ""};
  if (a.label == "id")
    c.label = b.label;
  else if (b.label == "id")
    c.label = a.label;
  else
    c.label = a.label + "*" + b.label;
  return c;
}

int aut_order(const CurveAut& a) {
  const Mat id = mat_identity(a.matrix.size());
  Mat p = a.matrix;
  for (int k = 1; k <= kMaxAutOrder; ++k) {
    if (p == id) return k;
    p = mat_mul(p, a.matrix);
  }
  throw StabforgeError("automorphism " + a.label + " has no finite order up to " + std::to_string(kMaxAutOrder));
}

void validate_aut(const CurveAut& a) {
  const std::size_t n = a.matrix.size();
  if (n % 2 != 0) throw StabforgeError("automorphism matrix must be 2g x 2g");
  for (const auto& row : a.matrix)
    if (row.size() != n) throw StabforgeError("automorphism matrix must be square");
  const Mat j = symplectic_j(n);
  if (mat_mul(mat_mul(transpose(a.matrix), j), a.matrix) != j)
    throw StabforgeError("automorphism " + a.label + " does not preserve the symplectic form");
  aut_order(a);
}

ProductGroupElement identity_element(const ProductSpace& space) {
  ProductGroupElement g;
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    g.perm.push_back(i);
    g.auts.push_back(identity_aut(space.factor(i).genus));
  }
  g.label = "id";
  return g;
}

void validate_element(const ProductSpace& space, const ProductGroupElement& g) {
  const std::size_t n = space.dimension();
  if (g.perm.size() != n || g.auts.size() != n) throw StabforgeError("group element has wrong number of factors");
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t t = g.perm[i];
    if (t >= n || seen[t]) throw StabforgeError("group element permutation is not a bijection");
    seen[t] = true;
    const auto& a = space.factor(i);
    const auto& b = space.factor(t);
    if (a.genus != b.genus || a.iso_class != b.iso_class)
      throw StabforgeError("permutation maps factor " + a.name + " to non-isomorphic factor " + b.name);
    if (static_cast<int>(g.auts[i].matrix.size()) != 2 * a.genus)
      throw StabforgeError("automorphism size does not match genus of factor " + a.name);
    validate_aut(g.auts[i]);
  }
}

ProductGroupElement compose(const ProductGroupElement& g, const ProductGroupElement& h) {
  if (g.size() != h.size()) throw StabforgeError("composing elements on different products");
  ProductGroupElement out;
  out.perm.resize(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    out.perm[i] = g.perm[h.perm[i]];
    out.auts.push_back(compose(g.auts[h.perm[i]], h.auts[i]));
  }
  if (g.label == "id")
    out.label = h.label;
  else if (h.label == "id")
    out.label = g.label;
  else
    out.label = g.label + "." + h.label;
  return out;
}

GradedClass act(const ProductGroupElement& g, const GradedClass& v) {
  const auto& space = *v.space();
  const std::size_t n = space.dimension();
  if (g.size() != n) throw StabforgeError("act: element and class live on different products");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = space.factor(i);
    const auto& b = space.factor(g.perm[i]);
    if (a.genus != b.genus || a.iso_class != b.iso_class)
      throw StabforgeError("permutation maps factor " + a.name + " to non-isomorphic factor " + b.name);
  }
  GradedClass out(v.space());
  for (const auto& [m, c] : v.terms()) {
    // Expand the image of each factor's generator; the word keeps the source
    // factor order so normalize_word supplies the Koszul sign.
    struct Choice {
      std::uint8_t code;
      long coeff;
    };
    std::vector<std::vector<Choice>> options;
    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint8_t code = m[i];
      if (code == Monomial::kUnit) continue;
      targets.push_back(g.perm[i]);
      std::vector<Choice> opts;
      if (code == Monomial::kPoint) {
        opts.push_back({Monomial::kPoint, 1});
      } else {
        const auto& mat = g.auts[i].matrix;
        for (std::size_t k = 0; k < mat.size(); ++k)
          if (mat[k][code - 1] != 0) opts.push_back({static_cast<std::uint8_t>(k + 1), mat[k][code - 1]});
      }
      options.push_back(std::move(opts));
    }
    std::vector<std::size_t> idx(options.size(), 0);
    bool any_empty = std::any_of(options.begin(), options.end(), [](const auto& o) { return o.empty(); });
    if (any_empty) continue;
    while (true) {
      std::vector<Generator> word;
      long coeff = 1;
      for (std::size_t k = 0; k < options.size(); ++k) {
        word.push_back({targets[k], options[k][idx[k]].code});
        coeff *= options[k][idx[k]].coeff;
      }
      SignedMonomial s = normalize_word(n, word);
      if (s.sign != 0) out.add_term(s.monomial, c * GaussianRational(coeff * s.sign));
      // advance the odometer; stop after the last combination
      std::size_t k = options.size();
      while (k > 0 && ++idx[k - 1] == options[k - 1].size()) idx[--k] = 0;
      if (k == 0) break;
    }
  }
  return out;
}

std::vector<ProductGroupElement> close_group(const GroupScenario& scenario) {
  if (!scenario.space) throw StabforgeError("group scenario without space");
  for (const auto& g : scenario.generators) validate_element(*scenario.space, g);
  auto key = [](const ProductGroupElement& g) {
    std::vector<long> k(g.perm.begin(), g.perm.end());
    for (const auto& a : g.auts)
      for (const auto& row : a.matrix) k.insert(k.end(), row.begin(), row.end());
    return k;
  };
  std::vector<ProductGroupElement> elements{identity_element(*scenario.space)};
  std::set<std::vector<long>> seen{key(elements[0])};
  for (std::size_t next = 0; next < elements.size(); ++next) {
    for (const auto& gen : scenario.generators) {
      ProductGroupElement p = compose(gen, elements[next]);
      if (!seen.insert(key(p)).second) continue;
      if (elements.size() >= scenario.order_bound)
        throw StabforgeError("group closure exceeds order bound " + std::to_string(scenario.order_bound));
      elements.push_back(std::move(p));
    }
  }
  return elements;
}

LatticeMap invariant_sublattice(std::span<const ProductGroupElement> group, const std::vector<GradedClass>& basis) {
  ClassCoordinates coords(basis);
  const std::size_t k = basis.size();
  IntMatrix stacked(0, k);
  for (const auto& g : group) {
    std::vector<std::vector<Rational>> cols;
    for (std::size_t j = 0; j < k; ++j) {
      auto x = coords.solve(act(g, basis[j]));
      if (!x) throw StabforgeError("basis is not stable under group element " + g.label);
      (*x)[j] -= 1;
      cols.push_back(std::move(*x));
    }
    stacked = stacked.vconcat(clear_denominators(cols, k));
  }
  IntMatrix kernel = k == 0 ? IntMatrix(0, 0) : group.empty() ? IntMatrix::identity(k) : integer_kernel(stacked);
  LatticeMap out;
  out.matrix = hermite_normal_form(kernel);
  for (std::size_t c = 0; c < out.matrix.cols(); ++c) out.source_labels.push_back("inv" + std::to_string(c + 1));
  for (std::size_t j = 0; j < k; ++j) out.target_labels.push_back(basis[j].str());
  return out;
}

InvarianceReport charge_invariance_check(const Charge& z, std::span<const ProductGroupElement> generators) {
  InvarianceReport r;
  const SpacePtr& space = charge_space(z);
  for (const auto& g : generators) validate_element(*space, g);
  auto basis = monomial_basis(*space);
  for (std::size_t gi = 0; gi < generators.size(); ++gi) {
    for (const auto& m : basis) {
      auto v = GradedClass::monomial(space, m);
      auto before = evaluate(z, v);
      auto after = evaluate(z, act(generators[gi], v));
      ++r.checked;
      if (!(before == after)) {
        r.holds = false;
        r.generator = gi;
        r.witness = m;
        r.before = before;
        r.after = after;
        return r;
      }
    }
  }
  return r;
}

namespace {

// (C1 x C2)^n with factors C1_j, C2_j, iso classes C1 and C2.
SpacePtr paired_space(std::size_t n) {
  std::vector<CurveFactor> fs;
  for (std::size_t j = 1; j <= n; ++j) {
    fs.push_back({"C1_" + std::to_string(j), 1, "C1"});
    fs.push_back({"C2_" + std::to_string(j), 1, "C2"});
  }
  return std::make_shared<const ProductSpace>(std::move(fs));
}

// Swaps pair j with pair j+1.
ProductGroupElement pair_swap(const ProductSpace& space, std::size_t j) {
  auto g = identity_element(space);
  std::swap(g.perm[2 * j], g.perm[2 * j + 2]);
  std::swap(g.perm[2 * j + 1], g.perm[2 * j + 3]);
  g.label = "swap" + std::to_string(j + 1) + std::to_string(j + 2);
  return g;
}

// Acts by a1 on C1_j and a2 on C2_j.
ProductGroupElement on_pair(const ProductSpace& space, std::size_t j, const CurveAut& a1, const CurveAut& a2,
                            const std::string& label) {
  auto g = identity_element(space);
  g.auts[2 * j] = a1;
  g.auts[2 * j + 1] = a2;
  g.label = label + std::to_string(j + 1);
  return g;
}

std::size_t factorial(std::size_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

std::size_t power(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

CurveAut order_m_aut(int m) {
  if (m == 2) return inversion_aut(1);
  if (m == 3) return order3_aut();
  throw StabforgeError("unsupported automorphism order " + std::to_string(m) + " (2 or 3)");
}

}  // namespace

GroupScenario scenario_builder(const std::string& kind, std::size_t n, int m) {
  if (n < 1) throw StabforgeError("scenario needs n >= 1");
  GroupScenario s;
  s.kind = kind;
  const auto id = identity_aut(1);
  const auto inv = inversion_aut(1);
  if (kind == "kummer") {
    s.space = paired_space(n);
    for (std::size_t j = 0; j < n; ++j) s.generators.push_back(on_pair(*s.space, j, id, id, "t"));
    for (std::size_t j = 0; j + 1 < n; ++j) s.generators.push_back(pair_swap(*s.space, j));
    s.order_bound = factorial(n) * 2;
    s.note = "G acts by translations on C1 x C2; translation generators act as the identity on cohomology";
  } else if (kind == "enriques") {
    s.space = paired_space(n);
    for (std::size_t j = 0; j < n; ++j) {
      s.generators.push_back(on_pair(*s.space, j, inv, inv, "minus_id"));
      s.generators.push_back(on_pair(*s.space, j, inv, id, "tau"));
    }
    for (std::size_t j = 0; j + 1 < n; ++j) s.generators.push_back(pair_swap(*s.space, j));
    s.order_bound = power(4, n) * factorial(n);
    s.note = "tau = (-x + t1, y + t2); its translation parts act as the identity on cohomology";
  } else if (kind == "bielliptic") {
    s.space = paired_space(n);
    const auto a = order_m_aut(m);
    for (std::size_t j = 0; j < n; ++j) s.generators.push_back(on_pair(*s.space, j, id, a, "g"));
    for (std::size_t j = 0; j + 1 < n; ++j) s.generators.push_back(pair_swap(*s.space, j));
    s.order_bound = power(static_cast<std::size_t>(m), n) * factorial(n);
    s.note = "G translates C1 (identity on cohomology) and acts on C2 by an automorphism of order " +
             std::to_string(m);
  } else if (kind == "cynk-hulek") {
    const auto a = order_m_aut(m);
    const auto a_inv = m == 2 ? a : compose(a, a);
    s.space = ProductSpace::elliptic(n);
    for (std::size_t j = 0; j + 1 < n; ++j) {
      auto g = identity_element(*s.space);
      g.auts[j] = a;
      g.auts[j + 1] = a_inv;
      g.auts[j + 1].label = m == 2 ? "inv" : "zeta3^2";
      g.label = "d" + std::to_string(j + 1) + std::to_string(j + 2);
      s.generators.push_back(std::move(g));
    }
    s.order_bound = power(static_cast<std::size_t>(m), n - 1);
    s.note = "G_n = {a in (Z/" + std::to_string(m) + ")^n : sum a_i = 0}";
  } else {
    throw StabforgeError("unsupported scenario kind \"" + kind + "\"");
  }
  return s;
}

Json element_to_json(const ProductGroupElement& g) {
  Json auts = Json::array();
  for (const auto& a : g.auts) {
    if (a == identity_aut(a.genus()))
      auts.push_back("id");
    else if (a == inversion_aut(a.genus()))
      auts.push_back("inv");
    else if (a == order3_aut())
      auts.push_back("zeta3");
    else
      auts.push_back(a.matrix);
  }
  return Json{{"perm", g.perm}, {"auts", auts}};
}

ProductGroupElement element_from_json(const Json& j, const ProductSpace& space) {
  if (!j.is_object()) throw StabforgeError("group element must be an object");
  ProductGroupElement g = identity_element(space);
  g.label = "gen";
  if (j.contains("perm")) {
    const auto& p = j.at("perm");
    if (!p.is_array()) throw StabforgeError("perm must be an array");
    g.perm.clear();
    for (const auto& x : p) {
      if (!x.is_number_integer() || x.get<long>() < 0) throw StabforgeError("perm entries must be non-negative integers");
      g.perm.push_back(x.get<std::size_t>());
    }
  }
  if (j.contains("auts")) {
    const auto& a = j.at("auts");
    if (!a.is_array() || a.size() != space.dimension())
      throw StabforgeError("auts must list one automorphism per factor");
    for (std::size_t i = 0; i < a.size(); ++i) {
      int genus = space.factor(i).genus;
      const auto& x = a[i];
      if (x.is_string()) {
        auto s = x.get<std::string>();
        if (s == "id")
          g.auts[i] = identity_aut(genus);
        else if (s == "inv")
          g.auts[i] = inversion_aut(genus);
        else if (s == "zeta3") {
          if (genus != 1) throw StabforgeError("zeta3 needs an elliptic factor");
          g.auts[i] = order3_aut();
        } else
          throw StabforgeError("unknown automorphism \"" + s + "\"");
      } else if (x.is_array()) {
        CurveAut c;
        c.label = "matrix";
        for (const auto& row : x) {
          if (!row.is_array()) throw StabforgeError("automorphism matrix rows must be arrays");
          std::vector<long> r;
          for (const auto& e : row) {
            if (!e.is_number_integer()) throw StabforgeError("automorphism matrix entries must be integers");
            r.push_back(e.get<long>());
          }
          c.matrix.push_back(std::move(r));
        }
        g.auts[i] = std::move(c);
      } else {
        throw StabforgeError("automorphism must be a name or a matrix");
      }
    }
  }
  if (j.contains("label") && j.at("label").is_string()) g.label = j.at("label").get<std::string>();
  validate_element(space, g);
  return g;
}

}  // namespace stabforge

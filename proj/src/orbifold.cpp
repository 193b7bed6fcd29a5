#include "stabforge/orbifold.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <sstream>

namespace stabforge {

namespace {

int mod(long a, int m) { return static_cast<int>(((a % m) + m) % m); }

}  // namespace

TangentSignature::TangentSignature(int m_, std::vector<int> e) : m(m_), exponents(std::move(e)) {
  if (m < 2) throw StabforgeError("signature modulus must be at least 2");
  for (auto& x : exponents) x = mod(x, m);
  std::sort(exponents.begin(), exponents.end());
}

TangentSignature TangentSignature::padded(int m, std::size_t n, std::vector<int> nonzero) {
  if (nonzero.size() > n) throw StabforgeError("signature has more entries than its dimension");
  std::vector<int> e(n - nonzero.size(), 0);
  e.insert(e.end(), nonzero.begin(), nonzero.end());
  return TangentSignature(m, std::move(e));
}

std::size_t TangentSignature::codim() const {
  return static_cast<std::size_t>(std::count_if(exponents.begin(), exponents.end(), [](int e) { return e != 0; }));
}

std::vector<int> TangentSignature::nonzero() const {
  std::vector<int> out;
  for (int e : exponents)
    if (e != 0) out.push_back(e);
  return out;
}

TangentSignature TangentSignature::with(int e) const {
  auto v = exponents;
  v.push_back(e);
  return TangentSignature(m, std::move(v));
}

std::string TangentSignature::str() const {
  std::ostringstream os;
  os << "diag(";
  const char* z = m == 2 ? "-1" : "z";
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (i) os << ",";
    int e = exponents[i];
    if (e == 0)
      os << "1";
    else if (m == 2)
      os << z;
    else if (e == 1)
      os << z;
    else
      os << z << "^" << e;
  }
  os << ")";
  return os.str();
}

Json signature_to_json(const TangentSignature& s) {
  return Json{{"m", s.m}, {"exponents", s.exponents}, {"display", s.str()}};
}

bool sl_condition(const TangentSignature& sig) {
  long sum = std::accumulate(sig.exponents.begin(), sig.exponents.end(), 0L);
  return sum % sig.m == 0;
}

namespace {

long fixed_points_on_curve(int m) { return m == 2 ? 4 : 3; }

bool is_b1(const TangentSignature& s) { return s.nonzero() == std::vector<int>{1}; }
bool is_b2(const TangentSignature& s) { return s.m == 3 && s.nonzero() == std::vector<int>{2, 2}; }

void check_m(int m) {
  if (m == 4) throw StabforgeError("unsupported: dimension condition of BKR fails for Z/4 towers");
  if (m != 2 && m != 3) throw StabforgeError("unsupported tower order " + std::to_string(m) + " (2 or 3)");
}

}  // namespace

void validate_state(const StageState& s) {
  check_m(s.m);
  if (s.n < 1) throw StabforgeError("stage dimension must be at least 1");
  for (const auto& st : s.strata) {
    if (st.sig.m != s.m || st.sig.n() != s.n)
      throw StabforgeError("stratum " + st.label + " has signature " + st.sig.str() + " of the wrong shape");
    bool ok = (st.label == "B1" && is_b1(st.sig)) || (st.label == "B2" && is_b2(st.sig));
    if (!ok)
      throw StabforgeError("illegal odd stratum " + st.label + " with signature " + st.sig.str() + " for m = " +
                           std::to_string(s.m));
    if (st.dim + st.sig.codim() != s.n)
      throw StabforgeError("stratum " + st.label + " has dimension " + std::to_string(st.dim) +
                           " but codimension " + std::to_string(st.sig.codim()));
    if (st.pieces.empty()) throw StabforgeError("stratum " + st.label + " has no pieces");
    std::size_t top = 0;
    for (const auto& p : st.pieces) {
      if (!(p.sig == st.sig)) throw StabforgeError("piece " + p.family + " disagrees with its stratum signature");
      if (p.dim > st.dim) throw StabforgeError("piece " + p.family + " exceeds its stratum dimension");
      top = std::max(top, p.dim);
    }
    if (top != st.dim) throw StabforgeError("stratum " + st.label + " has no top-dimensional piece");
  }
}

StageState initial_state(int m, bool counting) {
  check_m(m);
  StageState s;
  s.n = 1;
  s.m = m;
  s.counting = counting;
  Piece p{"B1", "fixed points of the curve automorphism", 0, TangentSignature(m, {1}), std::nullopt};
  if (counting) p.components = fixed_points_on_curve(m);
  s.strata.push_back({"B1", 0, p.sig, {p}});
  return s;
}

std::vector<int> chart_parameter_exponents(const IdealChart& chart, const std::vector<int>& t, int m) {
  std::vector<int> out;
  for (const auto& g : chart) {
    if (g.lead.size() != t.size()) throw StabforgeError("chart generator has the wrong number of variables");
    if (!g.other) continue;
    if (g.other->size() != t.size()) throw StabforgeError("chart generator has the wrong number of variables");
    // x -> zeta^{-t} x sends lead - eps other to zeta^{-t.lead} (lead - eps zeta^{t.(lead - other)} other).
    long e = 0;
    for (std::size_t i = 0; i < t.size(); ++i) e += static_cast<long>(t[i]) * (g.lead[i] - (*g.other)[i]);
    out.push_back(mod(e, m));
  }
  return out;
}

namespace {

ChartGenerator mono(std::vector<int> lead) { return {std::move(lead), std::nullopt}; }
ChartGenerator bin(std::vector<int> lead, std::vector<int> other) { return {std::move(lead), std::move(other)}; }

InvariantPoint point_from_charts(const std::string& name, std::size_t parameter_dim,
                                 const std::vector<IdealChart>& charts, const std::vector<int>& t,
                                 const TangentSignature& sig) {
  std::vector<int> params;
  for (const auto& c : charts) {
    auto e = chart_parameter_exponents(c, t, sig.m);
    params.insert(params.end(), e.begin(), e.end());
  }
  return {name, parameter_dim, TangentSignature::padded(sig.m, sig.n(), params)};
}

}  // namespace

ClusterFamily classify_clusters(const TangentSignature& sig) {
  const auto nz = sig.nonzero();
  ClusterFamily f;
  if (sig.m == 2 && nz == std::vector<int>{1, 1}) {
    // variables (x_a, x_b); the odd action moves only the curve coordinate x_b
    const std::vector<int> t{0, 1};
    f.kind = "P1";
    f.fiber_dim = 1;
    f.description = "double points along directions [0:...:0:w_a:w_b]";
    f.invariant_points.push_back(point_from_charts("line_a", 0, {{bin({0, 1}, {1, 0}), mono({2, 0})}}, t, sig));
    f.invariant_points.push_back(point_from_charts("line_b", 0, {{bin({1, 0}, {0, 1}), mono({0, 2})}}, t, sig));
  } else if (sig.m == 3 && nz == std::vector<int>{1, 2}) {
    // x_a in the zeta-eigenspace, x_b (the curve coordinate) in the zeta^2-eigenspace
    const std::vector<int> t{0, 1};
    f.kind = "P_union_Q";
    f.fiber_dim = 1;
    f.description = "two projective lines P and Q meeting at the planar point";
    f.invariant_points.push_back(point_from_charts("P_inf", 0, {{mono({3, 0}), bin({0, 1}, {2, 0})}}, t, sig));
    f.invariant_points.push_back(point_from_charts("Q_inf", 0, {{mono({0, 3}), bin({1, 0}, {0, 2})}}, t, sig));
    f.invariant_points.push_back(point_from_charts(
        "P_0", 0,
        {{mono({1, 1}), mono({0, 2}), bin({2, 0}, {0, 1})}, {mono({1, 1}), mono({2, 0}), bin({0, 2}, {1, 0})}}, t,
        sig));
  } else if (sig.m == 3 && nz == std::vector<int>{2, 2, 2}) {
    const std::vector<int> t{0, 0, 1};
    f.kind = "P2";
    f.fiber_dim = 2;
    f.description = "linear triple points Spec C[x]/x^3 with x in the zeta^2-eigenspace";
    f.invariant_points.push_back(
        point_from_charts("R_0w", 1, {{bin({0, 1, 0}, {1, 0, 0}), bin({0, 0, 1}, {1, 0, 0}), mono({3, 0, 0})}}, t, sig));
    f.invariant_points.push_back(
        point_from_charts("R_inf", 0, {{bin({1, 0, 0}, {0, 0, 1}), bin({0, 1, 0}, {0, 0, 1}), mono({0, 0, 3})}}, t, sig));
  } else {
    throw StabforgeError("unsupported signature " + sig.str() + " for cluster classification (m = " +
                         std::to_string(sig.m) + ")");
  }
  return f;
}

TangentSignature parameter_action(const std::string& family, const TangentSignature& sig) {
  if (sig.m != 3) throw StabforgeError("parameter_action handles Z/3 families only");
  ClusterFamily f = classify_clusters(sig);
  for (const auto& p : f.invariant_points)
    if (p.name == family) return p.induced;
  throw StabforgeError("family " + family + " does not occur over signature " + sig.str());
}

BkrBound bkr_dimension_bound(std::size_t n, const std::vector<EvenStratum>& strata) {
  BkrBound b;
  b.computed = n;
  for (const auto& s : strata) b.computed = std::max(b.computed, s.dim + 2 * s.clusters.fiber_dim);
  b.bound = n + 1;
  b.pass = b.computed <= b.bound;
  return b;
}

namespace {

std::string family_of(const std::string& point) {
  if (point == "P_inf" || point == "Q_inf" || point == "line_a" || point == "line_b") return "B1'";
  if (point == "R_0w") return "B1''";
  if (point == "P_0") return "B2dagger";
  if (point == "R_inf") return "B2'";
  throw StabforgeError("unknown invariant point " + point);
}

std::optional<long> times(const std::optional<long>& a, long b) {
  if (!a) return std::nullopt;
  return *a * b;
}

StepResult step(const StageState& state) {
  validate_state(state);
  const int m = state.m;
  const std::size_t k = state.n;
  const std::size_t n1 = k + 1;
  const long fix = fixed_points_on_curve(m);

  StepResult r;
  r.audit.from_n = k;
  std::vector<Piece> pieces;

  // Free orbits inside X_k x C^fix: the odd element fixes each point.
  Piece free_curve{"B1o", "free orbits in X_k x (fixed points of C)", k, TangentSignature::padded(m, n1, {1}),
                   std::nullopt};
  if (state.counting) free_curve.components = fix;
  pieces.push_back(free_curve);

  for (const auto& st : state.strata) {
    std::optional<long> comps;
    if (state.counting) {
      long c = 0;
      for (const auto& p : st.pieces)
        if (p.dim == st.dim && p.components) c += *p.components;
      comps = c;
    }
    // Free orbits inside S x C: the point is fixed by (odd, 1) = odd * even.
    pieces.push_back({st.label == "B1" ? "B1o" : "B2o", "free orbits in " + st.label + " x C", st.dim + 1,
                      st.sig.with(0), comps});

    EvenStratum e;
    e.source = st.label;
    e.dim = st.dim;
    e.sig = st.sig.with(m - 1);
    e.sl = sl_condition(e.sig);
    e.clusters = classify_clusters(e.sig);
    e.contribution = e.dim + 2 * e.clusters.fiber_dim;
    for (const auto& p : e.clusters.invariant_points) {
      Piece cp{family_of(p.name), "cluster " + p.name + " over " + st.label + " x (fixed points of C)",
               e.dim + p.parameter_dim, p.induced, times(comps, fix)};
      pieces.push_back(cp);
      ClaimCheck c;
      c.point = p.name;
      c.expected = p.name == "P_0" || p.name == "R_inf" ? TangentSignature::padded(m, n1, {2, 2})
                                                         : TangentSignature::padded(m, n1, {1});
      c.computed = p.induced;
      c.match = c.expected == c.computed;
      r.audit.claims.push_back(c);
    }
    r.audit.even_strata.push_back(std::move(e));
  }

  r.audit.bkr = bkr_dimension_bound(n1, r.audit.even_strata);
  r.audit.dimension_equality = r.audit.bkr.computed == k + 2;
  r.audit.pass = r.audit.bkr.pass;
  for (const auto& e : r.audit.even_strata) r.audit.pass = r.audit.pass && e.sl;
  for (const auto& c : r.audit.claims) r.audit.pass = r.audit.pass && c.match;
  if (!r.audit.pass) {
    for (const auto& e : r.audit.even_strata)
      if (!e.sl) throw StabforgeError("audit failure: even stratum over " + e.source + " with " + e.sig.str() +
                                      " violates the SL condition");
    if (!r.audit.bkr.pass)
      throw StabforgeError("audit failure: fiber product dimension " + std::to_string(r.audit.bkr.computed) +
                           " exceeds " + std::to_string(r.audit.bkr.bound));
  }

  // Assemble the odd-action strata of X_{k+1}.
  r.next.n = n1;
  r.next.m = m;
  r.next.counting = state.counting;
  std::map<std::string, Stratum> by_label;
  for (auto& p : pieces) {
    std::string label;
    if (is_b1(p.sig))
      label = "B1";
    else if (is_b2(p.sig))
      label = "B2";
    else
      throw StabforgeError("audit failure: piece " + p.family + " (" + p.description + ") has signature " +
                           p.sig.str());
    auto& st = by_label[label];
    st.label = label;
    st.sig = p.sig;
    st.dim = std::max(st.dim, p.dim);
    st.pieces.push_back(std::move(p));
  }
  for (auto& [label, st] : by_label) r.next.strata.push_back(std::move(st));
  validate_state(r.next);
  return r;
}

}  // namespace

StepResult z2_step(const StageState& state) {
  if (state.m != 2) throw StabforgeError("z2_step needs an m = 2 state");
  return step(state);
}

StepResult z3_step(const StageState& state) {
  if (state.m != 3) throw StabforgeError("z3_step needs an m = 3 state");
  return step(state);
}

namespace {

// C[x1,x2]/(x1,x2)^3 with basis 1, x1, x2, x1^2, x1x2, x2^2.
using Poly = std::array<Rational, 6>;
constexpr std::array<std::pair<int, int>, 6> kMonos{{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};
const std::array<const char*, 6> kMonoNames{"1", "x1", "x2", "x1^2", "x1*x2", "x2^2"};

int mono_index(int a, int b) {
  for (std::size_t i = 0; i < kMonos.size(); ++i)
    if (kMonos[i].first == a && kMonos[i].second == b) return static_cast<int>(i);
  return -1;  // in (x1,x2)^3
}

Poly times_var(const Poly& p, int var) {
  Poly out{};
  for (std::size_t i = 0; i < 6; ++i) {
    if (sgn(p[i]) == 0) continue;
    int a = kMonos[i].first + (var == 0), b = kMonos[i].second + (var == 1);
    int j = mono_index(a, b);
    if (j >= 0) out[j] += p[i];
  }
  return out;
}

std::size_t span_rank(std::vector<Poly> rows) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < 6 && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && sgn(rows[p][c]) == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || sgn(rows[i][c]) == 0) continue;
      Rational f = rows[i][c] / rows[r][c];
      for (std::size_t j = 0; j < 6; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
  }
  return r;
}

bool in_span(const std::vector<Poly>& gens, const Poly& p) {
  auto with = gens;
  with.push_back(p);
  return span_rank(with) == span_rank(gens);
}

int character(std::size_t mono, const std::vector<int>& weights) {
  return mod(kMonos[mono].first * weights[0] + kMonos[mono].second * weights[1], 3);
}

std::string poly_str(const Poly& p, const char* param) {
  std::string s;
  for (std::size_t i = 0; i < 6; ++i) {
    if (sgn(p[i]) == 0) continue;
    if (!s.empty()) s += " + ";
    if (p[i] != 1) s += std::string(param) + "*";
    s += kMonoNames[i];
  }
  return s;
}

}  // namespace

std::vector<Z3ClusterComponent> enumerate_z3_clusters(const TangentSignature& sig) {
  if (sig.m != 3) throw StabforgeError("enumerate_z3_clusters needs m = 3");
  if (sig.nonzero() == std::vector<int>{2, 2, 2}) {
    auto f = classify_clusters(sig);
    return {{"linear", f.fiber_dim, "(x)^3 with x in the zeta^2-eigenspace", {0, 1, 2}}};
  }
  if (sig.nonzero() != std::vector<int>{1, 2})
    throw StabforgeError("unsupported signature " + sig.str() + " for cluster enumeration");

  // Cotangent weights: x1 spans the zeta-eigenspace, x2 the zeta^2-eigenspace.
  const std::vector<int> weights{1, 2};
  std::array<std::vector<std::size_t>, 3> spaces;
  for (std::size_t i = 0; i < 6; ++i) spaces[character(i, weights)].push_back(i);

  // A line in a 2-dimensional character space is [p:q] on its two monomials;
  // type 0 = [1:0], 1 = [0:1], 2 = [1:t] with t generic.
  auto line = [&](int chi, int type, const Rational& t) {
    Poly p{};
    const auto& sp = spaces[chi];
    if (type == 0) p[sp[0]] = 1;
    if (type == 1) p[sp[1]] = 1;
    if (type == 2) {
      p[sp[0]] = 1;
      p[sp[1]] = t;
    }
    return p;
  };
  auto admissible = [&](const std::array<int, 3>& types) {
    for (const Rational& t : {make_rational(2), make_rational(-5, 3)}) {
      std::vector<Poly> gens;
      for (int chi = 0; chi < 3; ++chi) gens.push_back(line(chi, types[chi], t));
      // proper: no generator with a constant term
      for (const auto& g : gens)
        if (sgn(g[0]) != 0) return false;
      for (const auto& g : gens)
        for (int var = 0; var < 2; ++var)
          if (!in_span(gens, times_var(g, var))) return false;
    }
    return true;
  };

  std::vector<std::array<int, 3>> ok;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        if (admissible({a, b, c})) ok.push_back({a, b, c});

  auto quotient_characters = [&](const std::array<int, 3>& types) {
    std::vector<Poly> gens;
    for (int chi = 0; chi < 3; ++chi) gens.push_back(line(chi, types[chi], make_rational(2)));
    std::vector<int> chars;
    std::vector<Poly> acc = gens;
    for (std::size_t i = 0; i < 6; ++i) {
      Poly e{};
      e[i] = 1;
      if (in_span(acc, e)) continue;
      acc.push_back(e);
      chars.push_back(character(i, weights));
    }
    std::sort(chars.begin(), chars.end());
    return chars;
  };
  auto ideal_str = [&](const std::array<int, 3>& types) {
    std::string s = "(";
    for (int chi = 0; chi < 3; ++chi) {
      if (chi) s += ", ";
      s += poly_str(line(chi, types[chi], make_rational(2)), "t");
    }
    return s + ")";
  };

  // Components: a character line held fixed while another sweeps all of P^1.
  std::vector<Z3ClusterComponent> out;
  std::vector<std::pair<int, int>> curves;  // (fixed character, its line type)
  for (int fixed_chi = 1; fixed_chi <= 2; ++fixed_chi) {
    int free_chi = 3 - fixed_chi;
    for (int ft = 0; ft < 3; ++ft) {
      std::size_t hits = 0;
      for (const auto& t : ok)
        if (t[fixed_chi] == ft) ++hits;
      if (hits != 3) continue;
      std::array<int, 3> generic{};
      for (const auto& t : ok)
        if (t[fixed_chi] == ft && t[free_chi] == 2) generic = t;
      // P sweeps the zeta^2 line (x2 + t x1^2); Q sweeps the zeta line.
      out.push_back({free_chi == 2 ? "P" : "Q", 1, ideal_str(generic), quotient_characters(generic)});
      curves.emplace_back(fixed_chi, ft);
    }
  }
  for (const auto& t : ok) {
    bool on_all = !curves.empty();
    for (const auto& [chi, type] : curves) on_all = on_all && t[chi] == type;
    if (on_all) out.push_back({"planar", 0, ideal_str(t), quotient_characters(t)});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

Tower run_tower(int m, std::size_t depth, bool counting) {
  check_m(m);
  if (depth < 1) throw StabforgeError("tower depth must be at least 1");
  Tower t;
  t.m = m;
  t.stages.push_back(initial_state(m, counting));
  while (t.stages.size() < depth) {
    StepResult r = m == 2 ? z2_step(t.stages.back()) : z3_step(t.stages.back());
    t.pass = t.pass && r.audit.pass;
    t.audits.push_back(std::move(r.audit));
    t.stages.push_back(std::move(r.next));
  }
  return t;
}

Json stage_to_json(const StageState& s) {
  Json strata = Json::array();
  for (const auto& st : s.strata) {
    Json pieces = Json::array();
    for (const auto& p : st.pieces) {
      Json jp{{"family", p.family}, {"description", p.description}, {"dim", p.dim}};
      if (p.components) jp["components"] = *p.components;
      pieces.push_back(jp);
    }
    strata.push_back(Json{{"label", st.label},
                          {"dim", st.dim},
                          {"codim", st.sig.codim()},
                          {"signature", signature_to_json(st.sig)},
                          {"pieces", pieces}});
  }
  return Json{{"n", s.n}, {"m", s.m}, {"strata", strata}};
}

Json audit_to_json(const StageAudit& a) {
  Json even = Json::array();
  for (const auto& e : a.even_strata) {
    Json pts = Json::array();
    for (const auto& p : e.clusters.invariant_points)
      pts.push_back(Json{{"name", p.name}, {"parameter_dim", p.parameter_dim}, {"induced", signature_to_json(p.induced)}});
    even.push_back(Json{{"source", e.source},
                        {"dim", e.dim},
                        {"signature", signature_to_json(e.sig)},
                        {"sl_condition", e.sl},
                        {"cluster_kind", e.clusters.kind},
                        {"fiber_dim", e.clusters.fiber_dim},
                        {"contribution", e.contribution},
                        {"invariant_points", pts}});
  }
  Json claims = Json::array();
  for (const auto& c : a.claims)
    claims.push_back(Json{{"point", c.point},
                          {"expected", signature_to_json(c.expected)},
                          {"computed", signature_to_json(c.computed)},
                          {"match", c.match}});
  return Json{{"from_n", a.from_n},
              {"to_n", a.from_n + 1},
              {"even_strata", even},
              {"bkr", Json{{"computed", a.bkr.computed}, {"bound", a.bkr.bound}, {"pass", a.bkr.pass}}},
              {"dimension_equality", a.dimension_equality},
              {"claims", claims},
              {"pass", a.pass}};
}

Json tower_to_json(const Tower& t) {
  Json stages = Json::array(), audits = Json::array();
  for (const auto& s : t.stages) stages.push_back(stage_to_json(s));
  for (const auto& a : t.audits) audits.push_back(audit_to_json(a));
  return Json{{"m", t.m}, {"depth", t.stages.size()}, {"stages", stages}, {"audits", audits}, {"pass", t.pass}};
}

}  // namespace stabforge

#include "stabforge/scenario.hpp"

#include "stabforge/descent.hpp"
#include "stabforge/orbifold.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

namespace stabforge {

namespace {

// ---------------------------------------------------------------------------
// Path-tracking view of a JSON document.

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

class Node {
 public:
  Node(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const Json& json() const { return *j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const { throw ScenarioError(path_, message); }

  void require_object(std::initializer_list<std::string_view> allowed) const {
    if (!j_->is_object()) fail("expected an object");
    for (const auto& item : j_->items()) {
      if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
        child(item.key()).fail("unknown key \"" + item.key() + "\"");
    }
  }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  Node at(const std::string& key) const {
    if (!has(key)) fail("missing required key \"" + key + "\"");
    return child(key);
  }

  std::optional<Node> get(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return child(key);
  }

  std::vector<Node> elements() const {
    if (!j_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_->size(); ++i) out.emplace_back((*j_)[i], path_ + "/" + std::to_string(i));
    return out;
  }

  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  long integer(long lo, long hi) const {
    if (!j_->is_number_integer()) fail("expected an integer");
    long v = j_->get<long>();
    if (v < lo || v > hi)
      fail("integer " + std::to_string(v) + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  Rational rational() const {
    try {
      return rational_from_json(*j_);
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

  Rational positive_rational() const {
    Rational q = rational();
    if (sgn(q) <= 0) fail("expected a positive rational, got " + to_string(q));
    return q;
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected a boolean");
    return j_->get<bool>();
  }

 private:
  Node child(const std::string& key) const { return Node(j_->at(key), path_ + "/" + escape_token(key)); }

  const Json* j_;
  std::string path_;
};

// ---------------------------------------------------------------------------
// Small JSON helpers for results and witnesses.

Json monomial_json(const Monomial& m) {
  Json j = Json::array();
  for (auto c : m.codes()) j.push_back(code_symbol(c));
  return j;
}

Json rationals_json(const std::vector<Rational>& v) {
  Json j = Json::array();
  for (const auto& q : v) j.push_back(rational_to_json(q));
  return j;
}

double round_ms(double ms) { return std::round(ms * 1000.0) / 1000.0; }

template <class F>
auto timed(F&& f, double& elapsed_ms) {
  auto start = std::chrono::steady_clock::now();
  auto finish = [&] {
    elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };
  if constexpr (std::is_void_v<decltype(f())>) {
    f();
    finish();
  } else {
    auto r = f();
    finish();
    return r;
  }
}

// ---------------------------------------------------------------------------
// Scenario header parsing.

CurveFactor parse_curve(const Node& n, bool require_positive_genus) {
  n.require_object({"name", "genus", "iso"});
  CurveFactor f;
  f.name = n.at("name").string();
  if (f.name.empty()) n.at("name").fail("curve name must be non-empty");
  f.genus = static_cast<int>(n.at("genus").integer(0, 16));
  if (require_positive_genus && f.genus < 1) n.at("genus").fail("genus >= 1 required");
  f.iso_class = n.has("iso") ? n.at("iso").string() : f.name;
  return f;
}

SpacePtr parse_space(const Node& n) {
  n.require_object({"factors", "elliptic", "genera"});
  int forms = n.has("factors") + n.has("elliptic") + n.has("genera");
  if (forms != 1) n.fail("give exactly one of \"factors\", \"elliptic\", \"genera\"");
  if (auto e = n.get("elliptic")) return ProductSpace::elliptic(static_cast<std::size_t>(e->integer(1, 8)));
  if (auto g = n.get("genera")) {
    std::vector<int> genera;
    for (const auto& x : g->elements()) genera.push_back(static_cast<int>(x.integer(0, 16)));
    if (genera.empty()) g->fail("at least one curve required");
    return ProductSpace::from_genera(genera);
  }
  const Node fs = n.at("factors");
  std::vector<CurveFactor> factors;
  for (const auto& f : fs.elements()) factors.push_back(parse_curve(f, false));
  if (factors.empty()) fs.fail("at least one curve required");
  for (std::size_t i = 0; i < factors.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (factors[i].name == factors[j].name) fs.elements()[i].fail("duplicate curve name \"" + factors[i].name + "\"");
  try {
    return std::make_shared<const ProductSpace>(std::move(factors));
  } catch (const std::exception& e) {
    fs.fail(e.what());
  }
}

GroupScenario parse_group(const Node& n, const SpacePtr& declared) {
  n.require_object({"builder", "n", "m", "generators", "order_bound"});
  if (n.has("builder") == n.has("generators")) n.fail("give exactly one of \"builder\" and \"generators\"");
  GroupScenario g;
  if (auto b = n.get("builder")) {
    std::string kind = b->string();
    auto count = static_cast<std::size_t>(n.at("n").integer(1, 4));
    int m = n.has("m") ? static_cast<int>(n.at("m").integer(2, 3)) : 2;
    try {
      g = scenario_builder(kind, count, m);
    } catch (const std::exception& e) {
      b->fail(e.what());
    }
    if (declared && !same_space(declared, g.space))
      n.fail("declared space does not match the space built for \"" + kind + "\"");
  } else {
    if (!declared) n.fail("explicit generators need a declared \"space\"");
    g.space = declared;
    g.kind = "explicit";
    for (const auto& e : n.at("generators").elements()) {
      try {
        auto el = element_from_json(e.json(), *declared);
        validate_element(*declared, el);
        g.generators.push_back(std::move(el));
      } catch (const ScenarioError&) {
        throw;
      } catch (const std::exception& ex) {
        e.fail(ex.what());
      }
    }
  }
  if (auto ob = n.get("order_bound")) g.order_bound = static_cast<std::size_t>(ob->integer(1, 1 << 20));
  return g;
}

// ---------------------------------------------------------------------------
// Step preparation.

struct Context {
  const Scenario* scenario;
  std::optional<Node> class_sets;
  std::optional<std::vector<std::vector<Rational>>> gram;
};

GradedClass parse_class(const Node& n, const SpacePtr& space) {
  try {
    return class_from_json(n.json(), space);
  } catch (const std::exception& e) {
    n.fail(e.what());
  }
}

/// Inline array of classes, or the name of an entry of "class_sets".
std::vector<GradedClass> parse_class_list(const Node& n, const Context& ctx, const SpacePtr& space) {
  const Node* source = &n;
  std::optional<Node> named;
  if (n.json().is_string()) {
    std::string name = n.string();
    if (!ctx.class_sets || !ctx.class_sets->has(name)) n.fail("unknown class set \"" + name + "\"");
    named = ctx.class_sets->at(name);
    source = &*named;
  }
  std::vector<GradedClass> out;
  for (const auto& c : source->elements()) out.push_back(parse_class(c, space));
  return out;
}

std::vector<std::vector<Rational>> parse_matrix(const Node& n) {
  std::vector<std::vector<Rational>> rows;
  for (const auto& r : n.elements()) {
    std::vector<Rational> row;
    for (const auto& x : r.elements()) row.push_back(x.rational());
    rows.push_back(std::move(row));
  }
  return rows;
}

LiuParams parse_liu(const Node& n, bool need_fiber) {
  n.require_object({"s", "t", "beta", "fiber"});
  LiuParams p;
  p.s = n.at("s").positive_rational();
  p.t = n.at("t").positive_rational();
  p.beta = n.at("beta").rational();
  if (auto f = n.get("fiber"))
    p.fiber = parse_curve(*f, true);
  else if (need_fiber)
    n.fail("missing required key \"fiber\"");
  else
    p.fiber = CurveFactor{"F", 1, "F"};
  return p;
}

SpacePtr extended_space(const SpacePtr& base, const CurveFactor& fiber) {
  auto factors = base->factors();
  factors.push_back(fiber);
  return std::make_shared<const ProductSpace>(std::move(factors));
}

Json invariance_witness(const InvarianceReport& r, std::span<const ProductGroupElement> gens) {
  Json w;
  w["generator"] = *r.generator;
  w["element"] = element_to_json(gens[*r.generator]);
  w["monomial"] = monomial_json(*r.witness);
  w["before"] = gaussian_to_json(r.before);
  w["after"] = gaussian_to_json(r.after);
  return w;
}

using StepFn = std::function<StepOutcome()>;

StepFn prepare_induction(const Node& n, const Context& ctx) {
  n.require_object({"step", "k", "genera", "w", "b", "shift"});
  if (n.has("k") == n.has("genera")) n.fail("give exactly one of \"k\" and \"genera\"");
  Rational w = n.has("w") ? n.at("w").positive_rational() : ctx.scenario->w;
  Rational b = n.has("b") ? n.at("b").rational() : ctx.scenario->b;
  std::optional<Rational> shift;
  if (auto s = n.get("shift")) shift = s->rational();
  if (auto k = n.get("k")) {
    auto count = static_cast<std::size_t>(k->integer(1, 6));
    return [=] {
      auto r = verify_induction_identity(w, b, count, shift);
      StepOutcome o;
      o.pass = r.holds;
      o.result = {{"k", count}, {"w", to_string(w)}, {"b", to_string(b)}, {"shift", to_string(r.shift)},
                  {"liu_beta", to_string(r.liu_beta)}, {"checked", r.checked}, {"holds", r.holds}};
      if (!r.holds)
        o.witness = {{"monomial", monomial_json(*r.witness)}, {"liu", gaussian_to_json(r.liu_value)},
                     {"exp", gaussian_to_json(r.exp_value)}};
      return o;
    };
  }
  const Node gn = n.at("genera");
  std::vector<int> genera;
  for (const auto& g : gn.elements()) {
    auto v = static_cast<int>(g.integer(0, 16));
    if (v < 1) g.fail("genus >= 1 required");
    genera.push_back(v);
  }
  if (genera.size() < 2) gn.fail("at least two curves required");
  return [=] {
    auto r = verify_induction_identity(w, b, genera, shift);
    StepOutcome o;
    o.pass = r.holds;
    o.result = {{"genera", genera}, {"w", to_string(w)}, {"b", to_string(b)}, {"shift", to_string(r.shift)},
                {"liu_beta", to_string(r.liu_beta)}, {"checked", r.checked}, {"holds", r.holds}};
    if (!r.holds)
      o.witness = {{"monomial", monomial_json(*r.witness)}, {"liu", gaussian_to_json(r.liu_value)},
                   {"exp", gaussian_to_json(r.exp_value)}};
    return o;
  };
}

StepFn prepare_skyscraper(const Node& n, const Context& ctx) {
  n.require_object({"step", "k_max"});
  auto k_max = static_cast<std::size_t>(n.has("k_max") ? n.at("k_max").integer(1, 8) : 6);
  SpacePtr space = ctx.scenario->space;
  Rational w = ctx.scenario->w, b = ctx.scenario->b;
  return [=] {
    StepOutcome o;
    Json checked = Json::array();
    auto check = [&](const SpacePtr& s, const std::string& label) {
      auto z = exp_charge(s, w, b);
      auto value = z.evaluate(GradedClass::top(s));
      checked.push_back({{"space", label}, {"value", gaussian_to_json(value)}});
      if (!(value == GaussianRational(-1)) && o.pass) {
        o.pass = false;
        o.witness = {{"space", space_to_json(*s)}, {"w", to_string(w)}, {"b", to_string(b)},
                     {"value", gaussian_to_json(value)}};
      }
    };
    for (std::size_t k = 1; k <= k_max; ++k) check(ProductSpace::elliptic(k), "E^" + std::to_string(k));
    check(space, "scenario");
    o.result = {{"w", to_string(w)}, {"b", to_string(b)}, {"checked", checked}};
    return o;
  };
}

StepFn prepare_invariance(const Node& n, const Context& ctx) {
  n.require_object({"step"});
  if (!ctx.scenario->group) n.fail("step needs a \"group\"");
  GroupScenario group = *ctx.scenario->group;
  Rational w = ctx.scenario->w, b = ctx.scenario->b;
  return [=] {
    auto z = exp_charge(group.space, w, b);
    auto r = charge_invariance_check(z, group.generators);
    auto order = close_group(group).size();
    StepOutcome o;
    o.pass = r.holds;
    o.result = {{"group", group.kind}, {"generators", group.generators.size()}, {"group_order", order},
                {"checked", r.checked}, {"holds", r.holds}, {"note", group.note}};
    if (!r.holds) o.witness = invariance_witness(r, group.generators);
    return o;
  };
}

StepFn prepare_descend(const Node& n, const Context& ctx) {
  n.require_object({"step", "basis"});
  if (!ctx.scenario->group) n.fail("step needs a \"group\"");
  GroupScenario group = *ctx.scenario->group;
  std::optional<std::vector<GradedClass>> basis;
  if (auto bn = n.get("basis")) basis = parse_class_list(*bn, ctx, group.space);
  Rational w = ctx.scenario->w, b = ctx.scenario->b;
  return [=] {
    auto z = exp_charge(group.space, w, b);
    StepOutcome o;
    try {
      auto d = descend_charge_to_quotient(z, group.generators, basis);
      Json values = Json::array();
      for (const auto& v : d.values) values.push_back(gaussian_to_json(v));
      o.result = {{"rank", d.invariant.rank()}, {"working_rank", d.invariant.target_labels.size()},
                  {"values", values}};
    } catch (const InvarianceError& e) {
      o.pass = false;
      o.result = {{"message", e.what()}};
      o.witness = invariance_witness(e.report(), group.generators);
    }
    return o;
  };
}

StepFn prepare_restrict(const Node& n, const Context& ctx) {
  n.require_object({"step", "collapsed", "source", "target", "saturate", "expect_base_exp"});
  SpacePtr space = ctx.scenario->space;
  const Node cn = n.at("collapsed");
  std::vector<std::size_t> collapsed;
  for (const auto& c : cn.elements())
    collapsed.push_back(static_cast<std::size_t>(c.integer(0, static_cast<long>(space->dimension()) - 1)));
  std::optional<FiberInclusionSpec> spec;
  try {
    spec.emplace(space, collapsed);
  } catch (const std::exception& e) {
    cn.fail(e.what());
  }
  std::optional<std::vector<GradedClass>> source, target;
  if (auto s = n.get("source")) source = parse_class_list(*s, ctx, spec->base());
  if (auto t = n.get("target")) target = parse_class_list(*t, ctx, space);
  bool saturate = n.has("saturate") && n.at("saturate").boolean();
  bool expect = !n.has("expect_base_exp") || n.at("expect_base_exp").boolean();
  Rational w = ctx.scenario->w, b = ctx.scenario->b;
  FiberInclusionSpec inc = *spec;
  return [=] {
    Charge z = exp_charge(space, w, b);
    auto r = restrict_charge(z, inc, source, target, saturate);
    Charge base = exp_charge(inc.base(), w, b);
    bool kernel_matches = r.charge.kernel() == charge_kernel(base);
    auto compat = numerical_compatibility_check(z, base, inc);
    StepOutcome o;
    o.pass = !expect || (kernel_matches && compat.holds);
    Json lambda0 = r.lambda0.to_json();
    o.result = {{"base", space_to_json(*inc.base())},
                {"restricted_kernel", class_to_json(r.charge.kernel())},
                {"skyscraper", gaussian_to_json(r.charge.evaluate(GradedClass::top(inc.base())))},
                {"lambda0", lambda0},
                {"saturated", saturate},
                {"kernel_matches_base_exp", kernel_matches},
                {"compatibility", {{"holds", compat.holds}, {"checked", compat.checked}}}};
    if (!o.pass) {
      o.witness = {{"restricted_kernel", class_to_json(r.charge.kernel())},
                   {"base_kernel", class_to_json(charge_kernel(base))}};
      if (!compat.holds) {
        o.witness["monomial"] = monomial_json(*compat.witness);
        o.witness["ambient_value"] = gaussian_to_json(compat.ambient_value);
        o.witness["base_value"] = gaussian_to_json(compat.base_value);
      }
    }
    return o;
  };
}

StepFn prepare_compatibility(const Node& n, const Context& ctx) {
  n.require_object({"step", "k_max", "liu"});
  std::vector<LiuParams> params;
  if (auto l = n.get("liu")) {
    for (const auto& p : l->elements()) params.push_back(parse_liu(p, false));
    if (params.empty()) l->fail("at least one parameter set required");
  } else if (ctx.scenario->liu) {
    params.push_back(*ctx.scenario->liu);
  } else {
    params.push_back(LiuParams{ctx.scenario->w, ctx.scenario->w, -ctx.scenario->b, CurveFactor{"F", 1, "F"}});
  }
  std::vector<SpacePtr> bases;
  if (auto k = n.get("k_max")) {
    auto k_max = static_cast<std::size_t>(k->integer(1, 5));
    for (std::size_t i = 1; i <= k_max; ++i) bases.push_back(ProductSpace::elliptic(i));
  } else {
    bases.push_back(ctx.scenario->space);
  }
  Rational w = ctx.scenario->w, b = ctx.scenario->b;
  return [=] {
    StepOutcome o;
    Json rows = Json::array();
    for (const auto& base_space : bases) {
      auto base = exp_charge(base_space, w, b);
      for (const auto& p : params) {
        CurveFactor fiber = p.fiber;
        for (const auto& f : base_space->factors())
          if (f.name == fiber.name) fiber.name += "'";
        auto abcd = extract_abcd(base, fiber);
        auto liu = liu_charge(abcd, p.s, p.t, p.beta);
        FiberInclusionSpec inc(liu.space(), {liu.space()->dimension() - 1});
        auto r = numerical_compatibility_check(liu, base, inc);
        rows.push_back({{"k", base_space->dimension()}, {"s", to_string(p.s)}, {"t", to_string(p.t)},
                        {"beta", to_string(p.beta)}, {"fiber_genus", fiber.genus}, {"checked", r.checked},
                        {"holds", r.holds}});
        if (!r.holds && o.pass) {
          o.pass = false;
          o.witness = {{"k", base_space->dimension()}, {"monomial", monomial_json(*r.witness)},
                       {"ambient_value", gaussian_to_json(r.ambient_value)},
                       {"base_value", gaussian_to_json(r.base_value)}};
        }
      }
    }
    o.result = {{"w", to_string(w)}, {"b", to_string(b)}, {"checks", rows}};
    return o;
  };
}

StepFn prepare_support(const Node& n, const Context& ctx) {
  n.require_object({"step", "basis", "gram", "classes", "expect", "c_squared"});
  SpacePtr space = ctx.scenario->space;
  auto basis = parse_class_list(n.at("basis"), ctx, space);
  std::vector<std::vector<Rational>> gram;
  if (auto g = n.get("gram"))
    gram = parse_matrix(*g);
  else if (ctx.gram)
    gram = *ctx.gram;
  else
    for (std::size_t i = 0; i < basis.size(); ++i) {
      gram.emplace_back(basis.size(), Rational(0));
      gram.back()[i] = 1;
    }
  if (gram.size() != basis.size()) n.fail("gram size does not match the basis");
  const Node cn = n.at("classes");
  std::vector<std::vector<Rational>> classes;
  for (const auto& c : cn.elements()) {
    std::vector<Rational> coords;
    for (const auto& x : c.elements()) coords.push_back(x.rational());
    if (coords.size() != basis.size()) c.fail("coordinate count does not match the basis");
    classes.push_back(std::move(coords));
  }
  std::optional<std::string> expect;
  if (auto e = n.get("expect")) {
    expect = e->string();
    if (*expect != "finite" && *expect != "infinite") e->fail("expected \"finite\" or \"infinite\"");
  }
  std::optional<Rational> c_squared;
  if (auto c = n.get("c_squared")) c_squared = c->rational();
  Rational w = ctx.scenario->w, b = ctx.scenario->b;
  return [=] {
    auto z = exp_charge(space, w, b);
    auto r = effective_support_constant(z, basis, gram, classes);
    StepOutcome o;
    o.result = support_report_to_json(r);
    if (expect) o.pass = (*expect == "infinite") == r.infinite;
    if (c_squared) o.pass = o.pass && !r.infinite && r.c_squared == *c_squared;
    if (r.witness) o.result["witness_coordinates"] = rationals_json(classes[*r.witness]);
    if (!o.pass) {
      o.witness = {{"infinite", r.infinite}, {"c_squared", to_string(r.c_squared)}};
      if (r.witness) o.witness["class"] = rationals_json(classes[*r.witness]);
    }
    return o;
  };
}

StepFn prepare_lift(const Node& n, const Context& ctx) {
  n.require_object({"step", "ch", "expect"});
  auto ch = parse_class(n.at("ch"), ctx.scenario->space);
  bool expect = !n.has("expect") || n.at("expect").boolean();
  return [=] {
    auto r = lift_criterion_check(ch);
    StepOutcome o;
    o.pass = r.holds == expect;
    o.result = {{"holds", r.holds}, {"expected", expect}};
    if (!o.pass) o.witness = {{"difference", class_to_json(r.difference)}};
    return o;
  };
}

StepFn prepare_tower(const Node& n, const Context&) {
  n.require_object({"step", "m", "depth", "counting"});
  int m = static_cast<int>(n.at("m").integer(2, 4));
  auto depth = static_cast<std::size_t>(n.at("depth").integer(1, 12));
  bool counting = n.has("counting") && n.at("counting").boolean();
  return [=] {
    auto t = run_tower(m, depth, counting);
    StepOutcome o;
    o.pass = t.pass;
    Json audits = Json::array();
    for (const auto& a : t.audits) {
      std::size_t matched = std::count_if(a.claims.begin(), a.claims.end(), [](const auto& c) { return c.match; });
      audits.push_back({{"from_n", a.from_n}, {"computed", a.bkr.computed}, {"bound", a.bkr.bound},
                        {"dimension_equality", a.dimension_equality}, {"claims", a.claims.size()},
                        {"claims_matched", matched}, {"pass", a.pass}});
      if (!a.pass && o.witness.is_null()) o.witness = audit_to_json(a);
    }
    o.result = {{"m", m}, {"depth", depth}, {"counting", counting}, {"audits", audits}, {"pass", t.pass}};
    return o;
  };
}

StepFn prepare_grr(const Node& n, const Context& ctx) {
  n.require_object({"step", "max_collapsed"});
  auto max_c = static_cast<std::size_t>(n.has("max_collapsed") ? n.at("max_collapsed").integer(1, 5) : 4);
  SpacePtr space = ctx.scenario->space;
  return [=] {
    StepOutcome o;
    std::size_t euler = 0, fiber = 0;
    for (std::size_t c = 1; c <= max_c && o.pass; ++c) {
      auto ambient = ProductSpace::elliptic(c + 1);
      std::vector<std::size_t> collapsed(c);
      std::iota(collapsed.begin(), collapsed.end(), 1);
      FiberInclusionSpec inc(ambient, collapsed);
      for (const auto& m : monomial_basis(*inc.base())) {
        auto r = euler_identity_check(GradedClass::monomial(inc.base(), m), inc);
        ++euler;
        if (!r.holds) {
          o.pass = false;
          o.witness = {{"identity", "euler"}, {"collapsed", c}, {"monomial", monomial_json(m)},
                       {"restricted_pushforward", class_to_json(r.restricted_pushforward)},
                       {"alternating_sum", class_to_json(r.alternating_sum)}};
          break;
        }
      }
    }
    if (o.pass && space->dimension() >= 2) {
      std::size_t last = space->dimension() - 1;
      ProjectionSpec p(space, {last});
      FiberInclusionSpec i(space, {last});
      for (const auto& m : monomial_basis(*space)) {
        if (m[last] != Monomial::kPoint) continue;
        auto v = GradedClass::monomial(space, m);
        auto back = fiber_pushforward(grr_proj_pushforward(v, p), i);
        ++fiber;
        if (!(back == v)) {
          o.pass = false;
          o.witness = {{"identity", "fiber_supported"}, {"monomial", monomial_json(m)},
                       {"image", class_to_json(back)}};
          break;
        }
      }
    }
    o.result = {{"euler_checked", euler}, {"fiber_supported_checked", fiber}, {"max_collapsed", max_c}};
    return o;
  };
}

StepFn prepare_positivity(const Node& n, const Context& ctx) {
  n.require_object({"step", "classes", "fiber"});
  CurveFactor fiber = ctx.scenario->liu ? ctx.scenario->liu->fiber : CurveFactor{"F", 1, "F"};
  if (auto f = n.get("fiber")) fiber = parse_curve(*f, true);
  SpacePtr base = ctx.scenario->space;
  auto ext = extended_space(base, fiber);
  auto classes = parse_class_list(n.at("classes"), ctx, ext);
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (!classes[i].has_rational_coefficients())
      n.at("classes").fail("class " + std::to_string(i) + " has non-rational coefficients");
  Rational w = ctx.scenario->w, b = ctx.scenario->b;
  return [=] {
    auto abcd = extract_abcd(exp_charge(base, w, b), fiber);
    auto r = weak_positivity_report(abcd, classes);
    StepOutcome o;
    o.pass = r.pass;
    Json entries = Json::array();
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
      const auto& e = r.entries[i];
      Json j = {{"a", to_string(e.a)}, {"b", to_string(e.b)}, {"c", to_string(e.c)}, {"d", to_string(e.d)},
                {"ok", e.ok()}};
      entries.push_back(j);
      if (!e.ok() && o.witness.is_null()) o.witness = {{"class", i}, {"entry", j}};
    }
    o.result = {{"entries", entries}, {"pass", r.pass}};
    return o;
  };
}

StepFn prepare_clusters(const Node& n, const Context&) {
  n.require_object({"step", "m", "signature", "expect"});
  int m = n.has("m") ? static_cast<int>(n.at("m").integer(2, 6)) : 3;
  std::vector<int> exps{1, 2};
  if (auto s = n.get("signature")) {
    exps.clear();
    for (const auto& e : s->elements()) exps.push_back(static_cast<int>(e.integer(0, m - 1)));
  }
  std::vector<std::string> expect{"P", "Q", "planar"};
  if (auto e = n.get("expect")) {
    expect.clear();
    for (const auto& x : e->elements()) expect.push_back(x.string());
  }
  return [=] {
    TangentSignature sig(m, exps);
    auto comps = enumerate_z3_clusters(sig);
    StepOutcome o;
    Json list = Json::array();
    std::vector<std::string> names;
    for (const auto& c : comps) {
      list.push_back({{"name", c.name}, {"dim", c.dim}, {"ideal", c.ideal}, {"characters", c.quotient_characters}});
      names.push_back(c.name);
      auto chars = c.quotient_characters;
      std::sort(chars.begin(), chars.end());
      std::vector<int> regular(static_cast<std::size_t>(m));
      std::iota(regular.begin(), regular.end(), 0);
      if (chars != regular && o.pass) {
        o.pass = false;
        o.witness = {{"component", c.name}, {"characters", c.quotient_characters}};
      }
    }
    auto sorted_names = names, sorted_expect = expect;
    std::sort(sorted_names.begin(), sorted_names.end());
    std::sort(sorted_expect.begin(), sorted_expect.end());
    if (sorted_names != sorted_expect && o.pass) {
      o.pass = false;
      o.witness = {{"components", names}, {"expected", expect}};
    }
    o.result = {{"signature", signature_to_json(sig)}, {"components", list}};
    return o;
  };
}

StepFn prepare_hn(const Node& n, const Context& ctx) {
  n.require_object({"step", "factors", "permutations"});
  SpacePtr space = ctx.scenario->space;
  const Node fn = n.at("factors");
  std::vector<HNFactor> factors;
  for (const auto& f : fn.elements()) {
    f.require_object({"class", "shift"});
    factors.push_back(HNFactor{parse_class(f.at("class"), space), f.has("shift") ? f.at("shift").integer(-8, 8) : 0});
  }
  if (factors.empty()) fn.fail("at least one factor required");
  bool perms = !n.has("permutations") || n.at("permutations").boolean();
  if (perms && factors.size() > 8) fn.fail("permutation check limited to 8 factors");
  Rational w = ctx.scenario->w, b = ctx.scenario->b;
  return [=] {
    Charge z = exp_charge(space, w, b);
    auto poly = hn_polygon(z, factors);
    StepOutcome o;
    o.pass = poly.concave;
    std::size_t checked = 0;
    if (perms) {
      std::vector<GaussianRational> charges;
      for (const auto& f : factors) {
        auto v = evaluate(z, f.cls);
        charges.push_back(f.shift % 2 == 0 ? v : -v);
      }
      std::vector<std::size_t> order(factors.size());
      std::iota(order.begin(), order.end(), 0);
      do {
        std::vector<GaussianRational> steps;
        for (auto i : order) steps.push_back(charges[i]);
        auto pts = path_vertices(steps);
        ++checked;
        if (!weakly_dominates(poly, pts)) {
          o.pass = false;
          o.witness = {{"order", order}};
          break;
        }
      } while (std::next_permutation(order.begin(), order.end()));
    }
    Json vertices = Json::array();
    for (const auto& v : poly.vertices) vertices.push_back(gaussian_to_json(v));
    o.result = {{"vertices", vertices}, {"segments", poly.segments.size()}, {"concave", poly.concave},
                {"permutations_checked", checked}};
    return o;
  };
}

struct StepKind {
  const char* name;
  const char* certifies;
  StepFn (*prepare)(const Node&, const Context&);
};

const std::vector<StepKind>& step_kinds() {
  static const std::vector<StepKind> kinds = {
      {"induction_identity", "extending Z_k^{w,b} over one more curve with s = t = w reproduces Z_{k+1}^{w,b}",
       prepare_induction},
      {"skyscraper", "point sheaves have charge -1, hence phase 1", prepare_skyscraper},
      {"invariance", "the exponential charge is invariant under every group generator", prepare_invariance},
      {"descend", "the charge restricts to the invariant sublattice", prepare_descend},
      {"restrict", "restriction to a point fiber gives the base exponential charge; image lattice of i_*",
       prepare_restrict},
      {"numerical_compatibility", "Z(i_* v) = Z_base(v) for charges extended over a curve", prepare_compatibility},
      {"support", "effective support constant over the declared class set", prepare_support},
      {"lift_criterion", "ch(L) = 1, so twisting by L preserves classes and charges", prepare_lift},
      {"ch_tower", "every Cynk-Hulek tower stage satisfies the SL and BKR dimension conditions", prepare_tower},
      {"grr_identities", "Grothendieck-Riemann-Roch identities for point-fiber inclusions", prepare_grr},
      {"weak_positivity", "weak positivity of the (a, b, c, d) functionals", prepare_positivity},
      {"clusters", "Z/3 clusters over a codimension-2 fixed stratum", prepare_clusters},
      {"hn_polygon", "the phase-ordered HN polygon bounds every reordering of its factors", prepare_hn},
  };
  return kinds;
}

}  // namespace

// ---------------------------------------------------------------------------

Scenario parse_scenario(const Json& document) {
  Node root(document, "");
  root.require_object({"name", "description", "space", "group", "charge", "class_sets", "gram", "pipeline"});
  Scenario s;
  s.name = root.at("name").string();
  if (auto d = root.get("description")) s.description = d->string();

  SpacePtr declared;
  if (auto sp = root.get("space")) declared = parse_space(*sp);
  if (auto g = root.get("group")) s.group = parse_group(*g, declared);
  s.space = s.group ? s.group->space : declared;
  if (!s.space) root.fail("missing required key \"space\" (or a group builder)");

  if (auto c = root.get("charge")) {
    c->require_object({"w", "b", "liu"});
    s.w = c->at("w").positive_rational();
    s.b = c->at("b").rational();
    if (auto l = c->get("liu")) s.liu = parse_liu(*l, false);
  }

  Context ctx{&s, root.get("class_sets"), std::nullopt};
  if (ctx.class_sets && !ctx.class_sets->json().is_object()) ctx.class_sets->fail("expected an object");
  if (auto g = root.get("gram")) ctx.gram = parse_matrix(*g);

  const Node pipeline = root.at("pipeline");
  auto steps = pipeline.elements();
  if (steps.empty()) pipeline.fail("pipeline must contain at least one step");
  for (const auto& st : steps) {
    if (!st.json().is_object()) st.fail("expected an object");
    const Node kind_node = st.at("step");
    std::string kind = kind_node.string();
    const auto& kinds = step_kinds();
    auto it = std::find_if(kinds.begin(), kinds.end(), [&](const StepKind& k) { return kind == k.name; });
    if (it == kinds.end()) kind_node.fail("unknown step \"" + kind + "\"");
    s.pipeline.push_back(PreparedStep{kind, st.path(), it->certifies, it->prepare(st, ctx)});
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw StabforgeError("cannot open scenario file " + file.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ScenarioError("", file.string() + ": JSON syntax error at byte " + std::to_string(e.byte) + ": " +
                                e.what());
  }
  return parse_scenario(doc);
}

ScenarioReport run_scenario(const Scenario& scenario) {
  ScenarioReport report;
  report.scenario = scenario.name;
  report.status = "pass";
  auto start = std::chrono::steady_clock::now();
  bool halted = false;
  for (std::size_t i = 0; i < scenario.pipeline.size(); ++i) {
    const auto& step = scenario.pipeline[i];
    StepReport r;
    r.index = i;
    r.step = step.kind;
    r.certifies = step.certifies;
    if (halted) {
      r.status = "skipped";
      report.steps.push_back(std::move(r));
      continue;
    }
    try {
      auto outcome = timed(step.run, r.elapsed_ms);
      r.status = outcome.pass ? "pass" : "fail";
      r.result = std::move(outcome.result);
      r.witness = std::move(outcome.witness);
    } catch (const std::exception& e) {
      r.status = "error";
      r.message = step.path + ": " + e.what();
    }
    if (r.status != "pass") {
      halted = true;
      report.status = r.status;
    }
    report.steps.push_back(std::move(r));
  }
  report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Json report_to_json(const ScenarioReport& report) {
  Json steps = Json::array();
  for (const auto& s : report.steps) {
    Json j = {{"index", s.index},     {"step", s.step},       {"certifies", s.certifies},
              {"status", s.status},   {"result", s.result},   {"witness", s.witness},
              {"elapsed_ms", round_ms(s.elapsed_ms)}};
    if (!s.message.empty()) j["message"] = s.message;
    steps.push_back(std::move(j));
  }
  return {{"scenario", report.scenario},
          {"status", report.status},
          {"exit_code", report.exit_code()},
          {"steps", steps},
          {"elapsed_ms", round_ms(report.elapsed_ms)}};
}

std::string report_to_text(const ScenarioReport& report) {
  std::ostringstream out;
  out << "scenario " << report.scenario << ": " << (report.passed() ? "PASS" : "FAIL") << '\n';
  for (const auto& s : report.steps) {
    out << "  [" << s.index + 1 << "] " << s.step << ": " << s.status;
    if (s.status != "skipped") out << " (" << round_ms(s.elapsed_ms) << " ms)";
    out << "\n      " << s.certifies << '\n';
    if (!s.message.empty()) out << "      error: " << s.message << '\n';
    if (!s.witness.is_null()) out << "      witness: " << s.witness.dump() << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Concurrency.

std::size_t worker_limit() {
  std::size_t fallback = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("STABFORGE_THREADS");
  if (env == nullptr || *env == '\0') return fallback;
  std::string_view text(env);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0)
    throw StabforgeError("STABFORGE_THREADS must be a positive integer, got \"" + std::string(text) + "\"");
  return value;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Verification matrix.

namespace {

const std::vector<std::pair<Rational, Rational>>& sample_params() {
  static const std::vector<std::pair<Rational, Rational>> params = {
      {make_rational(1), make_rational(0)}, {make_rational(1, 2), make_rational(3)},
      {make_rational(2), make_rational(-1)}, {make_rational(3, 7), make_rational(-5, 2)}};
  return params;
}

std::string params_str(const Rational& w, const Rational& b) { return "(w,b)=(" + to_string(w) + "," + to_string(b) + ")"; }

MatrixRow make_row(std::string tag, std::string name, std::string certifies) {
  MatrixRow row;
  row.tag = std::move(tag);
  row.name = std::move(name);
  row.certifies = std::move(certifies);
  row.pass = true;
  return row;
}

void check_invariance(MatrixRow& row, const std::string& kind, std::size_t n, int m) {
  auto group = scenario_builder(kind, n, m);
  auto order = close_group(group).size();
  for (const auto& [w, b] : sample_params()) {
    auto r = charge_invariance_check(exp_charge(group.space, w, b), group.generators);
    row.checks += r.checked;
    if (!r.holds) {
      row.pass = false;
      row.details.push_back("FAIL " + kind + "(n=" + std::to_string(n) + ", m=" + std::to_string(m) + ") " +
                            params_str(w, b) + " generator " + std::to_string(*r.generator));
      return;
    }
  }
  row.details.push_back(kind + "(n=" + std::to_string(n) + (kind == "kummer" || kind == "enriques" ? "" : ", m=" + std::to_string(m)) +
                        "): invariant, group order " + std::to_string(order));
}

MatrixRow row_induction() {
  MatrixRow row = make_row("induction", "curve-product induction",
                "extended charges equal the next exponential charge; point sheaves have phase 1");
  for (std::size_t k = 1; k <= 4; ++k) {
    for (std::size_t p = 0; p < 3; ++p) {
      const auto& [w, b] = sample_params()[p];
      auto r = verify_induction_identity(w, b, k);
      row.checks += r.checked;
      if (!r.holds) {
        row.pass = false;
        row.details.push_back("FAIL induction k=" + std::to_string(k) + " " + params_str(w, b));
      }
    }
    row.details.push_back("k=" + std::to_string(k) + ": identity on every basis monomial for 3 parameter pairs");
  }
  for (std::size_t k = 1; k <= 6; ++k) {
    for (const auto& [w, b] : sample_params()) {
      auto space = ProductSpace::elliptic(k);
      ++row.checks;
      if (!(exp_charge(space, w, b).evaluate(GradedClass::top(space)) == GaussianRational(-1))) {
        row.pass = false;
        row.details.push_back("FAIL skyscraper k=" + std::to_string(k) + " " + params_str(w, b));
      }
    }
  }
  row.details.push_back("skyscraper charge -1 for k <= 6");
  return row;
}

MatrixRow row_kummer() {
  MatrixRow row = make_row("kummer", "generalized Kummer invariance",
                "exponential charges on (C1 x C2)^n are invariant under the Kummer-type group");
  for (std::size_t n = 1; n <= 3; ++n) check_invariance(row, "kummer", n, 2);
  return row;
}

MatrixRow row_cy_even() {
  MatrixRow row = make_row("cy-even", "Calabi-Yau quotients, even case",
                "exponential charges are invariant under the Enriques-type group");
  for (std::size_t n = 1; n <= 3; ++n) check_invariance(row, "enriques", n, 2);
  return row;
}

MatrixRow row_cy_odd() {
  MatrixRow row = make_row("cy-odd", "Calabi-Yau quotients, odd case",
                "exponential charges are invariant under the bielliptic-type groups of order 2 and 3");
  for (int m : {2, 3})
    for (std::size_t n = 1; n <= 3; ++n) check_invariance(row, "bielliptic", n, m);
  return row;
}

MatrixRow row_ch(int m) {
  std::size_t depth = m == 2 ? 8 : 6;
  MatrixRow row = make_row("ch", "Cynk-Hulek m=" + std::to_string(m),
                "invariance on E^n and a tower audit of depth " + std::to_string(depth));
  for (std::size_t n = 2; n <= 4; ++n) check_invariance(row, "cynk-hulek", n, m);
  auto tower = run_tower(m, depth);
  std::size_t claims = 0, equal = 0;
  for (const auto& a : tower.audits) {
    ++row.checks;
    claims += a.claims.size();
    equal += a.dimension_equality;
    if (!a.pass) {
      row.pass = false;
      row.details.push_back("FAIL audit at X_" + std::to_string(a.from_n));
    }
  }
  row.details.push_back("tower to X_" + std::to_string(depth) + ": " + std::to_string(tower.audits.size()) +
                        " stage audits pass, " + std::to_string(equal) + " with computed = k+2");
  if (m == 3) {
    row.details.push_back(std::to_string(claims) + " tangent claims match");
    auto comps = enumerate_z3_clusters(TangentSignature(3, {1, 2}));
    std::vector<std::string> names;
    for (const auto& c : comps) names.push_back(c.name);
    std::sort(names.begin(), names.end());
    row.checks += comps.size();
    if (names != std::vector<std::string>{"P", "Q", "planar"}) {
      row.pass = false;
      row.details.push_back("FAIL cluster components");
    } else {
      row.details.push_back("clusters over diag(z,z^2): P, Q and the planar junction");
    }
  }
  row.pass = row.pass && tower.pass;
  return row;
}

MatrixRow row_restriction() {
  MatrixRow row = make_row("restriction", "restriction to fibers",
                           "restricted charges are the base exponential charges; GRR identities; image lattice of i_*");
  auto space = ProductSpace::elliptic(2);
  FiberInclusionSpec inc(space, {1});
  for (const auto& [w, b] : sample_params()) {
    std::vector<GradedClass> rd{GradedClass::unit(inc.base()), GradedClass::point(inc.base(), 0)};
    auto r = restrict_charge(exp_charge(space, w, b), inc, rd);
    ++row.checks;
    if (!(r.charge.kernel() == exp_charge(inc.base(), w, b).kernel())) {
      row.pass = false;
      row.details.push_back("FAIL restriction " + params_str(w, b));
    }
    if (r.lambda0.rank() != 2) {
      row.pass = false;
      row.details.push_back("FAIL image lattice rank " + std::to_string(r.lambda0.rank()));
    }
  }
  row.details.push_back("E1 x {pt} in E1 x E2: restriction matches, image of (r, d) has rank 2");
  for (std::size_t k = 1; k <= 3; ++k) {
    for (const auto& [w, b] : sample_params()) {
      auto base = exp_charge(ProductSpace::elliptic(k), w, b);
      auto abcd = extract_abcd(base, CurveFactor{"E" + std::to_string(k + 1), 1, "E"});
      for (const auto& [s, t, beta] : std::vector<std::tuple<Rational, Rational, Rational>>{
               {w, w, -b}, {make_rational(2), make_rational(1, 3), make_rational(5, 4)}}) {
        auto liu = liu_charge(abcd, s, t, beta);
        auto r = numerical_compatibility_check(liu, base, FiberInclusionSpec(liu.space(), {k}));
        row.checks += r.checked;
        if (!r.holds) {
          row.pass = false;
          row.details.push_back("FAIL compatibility k=" + std::to_string(k));
        }
      }
    }
  }
  row.details.push_back("extended charges are compatible with their bases for k <= 3");
  for (std::size_t c = 1; c <= 4; ++c) {
    auto ambient = ProductSpace::elliptic(c + 1);
    std::vector<std::size_t> collapsed(c);
    std::iota(collapsed.begin(), collapsed.end(), 1);
    FiberInclusionSpec i(ambient, collapsed);
    for (const auto& m : monomial_basis(*i.base())) {
      ++row.checks;
      if (!euler_identity_check(GradedClass::monomial(i.base(), m), i).holds) {
        row.pass = false;
        row.details.push_back("FAIL Euler identity, collapsed=" + std::to_string(c));
      }
    }
  }
  row.details.push_back("Euler identity for 1..4 collapsed factors");
  return row;
}

struct RowSpec {
  const char* tag;
  MatrixRow (*run)();
};

const std::vector<RowSpec>& row_specs() {
  static const std::vector<RowSpec> specs = {
      {"induction", row_induction},
      {"kummer", row_kummer},
      {"cy-even", row_cy_even},
      {"cy-odd", row_cy_odd},
      {"ch", [] { return row_ch(2); }},
      {"ch", [] { return row_ch(3); }},
      {"restriction", row_restriction},
  };
  return specs;
}

}  // namespace

std::vector<std::string> matrix_tags() {
  std::vector<std::string> tags;
  for (const auto& s : row_specs())
    if (std::find(tags.begin(), tags.end(), s.tag) == tags.end()) tags.push_back(s.tag);
  return tags;
}

std::vector<MatrixRow> run_matrix(const std::optional<std::string>& only) {
  std::vector<const RowSpec*> selected;
  for (const auto& s : row_specs())
    if (!only || *only == s.tag) selected.push_back(&s);
  if (selected.empty()) {
    std::string known;
    for (const auto& t : matrix_tags()) known += (known.empty() ? "" : ", ") + t;
    throw StabforgeError("unknown matrix tag \"" + *only + "\" (known: " + known + ")");
  }
  std::vector<MatrixRow> rows(selected.size());
  parallel_for(selected.size(), worker_limit(), [&](std::size_t i) {
    double ms = 0;
    rows[i] = timed(selected[i]->run, ms);
    rows[i].elapsed_ms = ms;
  });
  return rows;
}

Json matrix_to_json(const std::vector<MatrixRow>& rows) {
  Json out = Json::array();
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.pass;
    out.push_back({{"tag", r.tag},
                   {"name", r.name},
                   {"certifies", r.certifies},
                   {"status", r.pass ? "pass" : "fail"},
                   {"checks", r.checks},
                   {"details", r.details},
                   {"elapsed_ms", round_ms(r.elapsed_ms)}});
  }
  return {{"status", all ? "pass" : "fail"}, {"rows", out}};
}

std::string matrix_to_text(const std::vector<MatrixRow>& rows) {
  std::ostringstream out;
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  for (const auto& r : rows) {
    out << (r.pass ? "PASS  " : "FAIL  ") << r.name << std::string(width - r.name.size() + 2, ' ') << '[' << r.tag
        << "]  checks=" << r.checks << "  " << round_ms(r.elapsed_ms) << " ms\n";
    for (const auto& d : r.details) out << "        " << d << '\n';
  }
  return out.str();
}

}  // namespace stabforge

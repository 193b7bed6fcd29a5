#include "stabforge/charge.hpp"

#include <algorithm>
#include <numeric>

namespace stabforge {

namespace {

GradedClass real_part(const GradedClass& v) {
  GradedClass out(v.space());
  for (const auto& [m, c] : v.terms()) out.add_term(m, GaussianRational(c.re()));
  return out;
}

GradedClass imag_part(const GradedClass& v) {
  GradedClass out(v.space());
  for (const auto& [m, c] : v.terms()) out.add_term(m, GaussianRational(c.im()));
  return out;
}

const GaussianRational kI = GaussianRational::i();

Rational cross(const GaussianRational& u, const GaussianRational& v) {
  return u.re() * v.im() - u.im() * v.re();
}

Rational real_value(const GaussianRational& z, const char* what) {
  if (!z.is_real()) throw StabforgeError(std::string(what) + ": expected a rational class");
  return z.re();
}

}  // namespace

GaussianRational KernelCharge::evaluate(const GradedClass& v) const {
  require_same_space(space(), v.space(), "evaluate");
  return -integrate(kernel_ * v);
}

KernelCharge exp_charge(const SpacePtr& space, const Rational& w, const Rational& b) {
  if (sgn(w) <= 0) throw StabforgeError("exp_charge: w must be positive");
  GradedClass exponent = hyperplane_class(space) * -GaussianRational(b, w);
  KernelCharge z(exp_nilpotent(exponent));
  z.exp_params = std::make_pair(w, b);
  return z;
}

AbcdFunctionals extract_abcd(const KernelCharge& base, const CurveFactor& fiber) {
  std::vector<CurveFactor> fs = base.space()->factors();
  fs.push_back(fiber);
  auto ambient = std::make_shared<const ProductSpace>(std::move(fs));
  const std::size_t n = ambient->dimension() - 1;
  ProjectionSpec proj(ambient, {n});

  GradedClass lifted = pullback(base.kernel(), proj);
  GradedClass l = GradedClass::point(ambient, n);
  GradedClass td = GradedClass::unit(ambient) + l * GaussianRational(Rational(1 - fiber.genus));
  GradedClass slope_part = lifted * l;     // -(a + i c) dual
  GradedClass constant_part = lifted * td;  // -(b + i d) dual

  return AbcdFunctionals{ambient,
                         n,
                         {-real_part(slope_part)},
                         {-real_part(constant_part)},
                         {-imag_part(slope_part)},
                         {-imag_part(constant_part)}};
}

AbcdCheck verify_abcd(const AbcdFunctionals& abcd, const KernelCharge& base, std::span<const long> ns) {
  ProjectionSpec proj(abcd.space, {abcd.fiber_factor});
  require_same_space(proj.base(), base.space(), "verify_abcd");
  GradedClass l = GradedClass::point(abcd.space, abcd.fiber_factor);
  for (long n : ns) {
    for (const auto& m : monomial_basis(*abcd.space)) {
      GradedClass v = GradedClass::monomial(abcd.space, m);
      GaussianRational lhs = base.evaluate(grr_proj_pushforward(tensor_line_bundle(v, l, n), proj));
      GaussianRational rhs =
          (abcd.a(v) + kI * abcd.c(v)) * GaussianRational(n) + abcd.b(v) + kI * abcd.d(v);
      if (!(lhs == rhs)) return {false, m, n};
    }
  }
  return {};
}

LiuCharge::LiuCharge(AbcdFunctionals abcd, Rational s, Rational t, Rational beta)
    : abcd_(std::move(abcd)), s_(std::move(s)), t_(std::move(t)), beta_(std::move(beta)) {
  if (sgn(s_) <= 0 || sgn(t_) <= 0) throw StabforgeError("liu_charge: s and t must be positive");
}

GaussianRational LiuCharge::evaluate(const GradedClass& v) const {
  require_same_space(space(), v.space(), "evaluate");
  GaussianRational a = abcd_.a(v), b = abcd_.b(v), c = abcd_.c(v), d = abcd_.d(v);
  GaussianRational re = GaussianRational(s_) * c + b - GaussianRational(beta_) * a;
  GaussianRational im = -GaussianRational(t_) * a + d - GaussianRational(beta_) * c;
  return re + kI * im;
}

GradedClass LiuCharge::kernel() const {
  const GradedClass& A = abcd_.a.dual;
  const GradedClass& B = abcd_.b.dual;
  const GradedClass& C = abcd_.c.dual;
  const GradedClass& D = abcd_.d.dual;
  GradedClass re = C * GaussianRational(s_) + B - A * GaussianRational(beta_);
  GradedClass im = D - A * GaussianRational(t_) - C * GaussianRational(beta_);
  return -(re + im * kI);
}

GaussianRational evaluate(const Charge& z, const GradedClass& v) {
  return std::visit([&](const auto& c) { return c.evaluate(v); }, z);
}

const SpacePtr& charge_space(const Charge& z) {
  return std::visit([](const auto& c) -> const SpacePtr& { return c.space(); }, z);
}

GradedClass charge_kernel(const Charge& z) {
  if (const auto* k = std::get_if<KernelCharge>(&z)) return k->kernel();
  return std::get<LiuCharge>(z).kernel();
}

Json charge_to_json(const Charge& z) {
  if (const auto* k = std::get_if<KernelCharge>(&z)) {
    Json params = Json::object();
    if (k->exp_params) params = {{"w", to_string(k->exp_params->first)}, {"b", to_string(k->exp_params->second)}};
    return Json{{"kind", "exp"}, {"params", params}, {"space", space_to_json(*k->space())},
                {"kernel", class_to_json(k->kernel())}};
  }
  const auto& l = std::get<LiuCharge>(z);
  Json abcd = {{"a", class_to_json(l.abcd().a.dual)},
               {"b", class_to_json(l.abcd().b.dual)},
               {"c", class_to_json(l.abcd().c.dual)},
               {"d", class_to_json(l.abcd().d.dual)}};
  return Json{{"kind", "liu"},
              {"params", {{"s", to_string(l.s())}, {"t", to_string(l.t())}, {"beta", to_string(l.beta())}}},
              {"space", space_to_json(*l.space())},
              {"abcd", abcd}};
}

std::optional<Rational> tilt_slope(const AbcdFunctionals& abcd, const Rational& t, const Rational& beta,
                                   const GradedClass& v) {
  if (sgn(t) <= 0) throw StabforgeError("tilt_slope: t must be positive");
  Rational a = real_value(abcd.a(v), "tilt_slope");
  Rational c = real_value(abcd.c(v), "tilt_slope");
  Rational d = real_value(abcd.d(v), "tilt_slope");
  if (sgn(c) == 0) return std::nullopt;
  Rational nu = (-t * a + d) / (t * c) - beta;
  return nu;
}

std::vector<TorsionSide> torsion_pair_report(const AbcdFunctionals& abcd, const Rational& t,
                                             const Rational& beta, std::span<const GradedClass> classes) {
  std::vector<TorsionSide> out;
  for (const auto& v : classes) {
    auto nu = tilt_slope(abcd, t, beta, v);
    out.push_back({nu, !nu || sgn(*nu) > 0});
  }
  return out;
}

PositivityReport weak_positivity_report(const AbcdFunctionals& abcd, std::span<const GradedClass> classes) {
  PositivityReport report;
  for (const auto& v : classes) {
    PositivityEntry e;
    e.a = real_value(abcd.a(v), "weak_positivity_report");
    e.b = real_value(abcd.b(v), "weak_positivity_report");
    e.c = real_value(abcd.c(v), "weak_positivity_report");
    e.d = real_value(abcd.d(v), "weak_positivity_report");
    e.c_nonnegative = sgn(e.c) >= 0;
    if (sgn(e.c) == 0) {
      e.d_nonnegative_if_c_zero = sgn(e.d) >= 0;
      e.a_nonpositive_if_c_zero = sgn(e.a) <= 0;
    }
    report.pass = report.pass && e.ok();
    report.entries.push_back(std::move(e));
  }
  return report;
}

namespace {

InductionReport run_induction(const Rational& w, const Rational& b, const SpacePtr& base_space,
                              const CurveFactor& fiber, std::optional<Rational> shift_override) {
  for (const auto& f : base_space->factors())
    if (f.genus < 1) throw StabforgeError("genus >= 1 required (factor " + f.name + ")");
  if (fiber.genus < 1) throw StabforgeError("genus >= 1 required (factor " + fiber.name + ")");
  if (base_space->dimension() < 1) throw StabforgeError("induction identity needs k >= 1");

  KernelCharge base = exp_charge(base_space, w, b);
  AbcdFunctionals abcd = extract_abcd(base, fiber);

  InductionReport r;
  r.shift = shift_override ? *shift_override : Rational(fiber.genus - 1) - b;
  r.liu_beta = -r.shift;
  LiuCharge extended(abcd, w, w, r.liu_beta);
  KernelCharge target = exp_charge(abcd.space, w, b);

  r.holds = true;
  for (const auto& m : monomial_basis(*abcd.space)) {
    GradedClass v = GradedClass::monomial(abcd.space, m);
    GaussianRational lhs = extended.evaluate(v);
    GaussianRational rhs = target.evaluate(v);
    ++r.checked;
    if (!(lhs == rhs)) {
      r.holds = false;
      r.witness = m;
      r.liu_value = lhs;
      r.exp_value = rhs;
      break;
    }
  }
  return r;
}

}  // namespace

InductionReport verify_induction_identity(const Rational& w, const Rational& b, const std::vector<int>& genera,
                                          std::optional<Rational> shift_override) {
  if (genera.size() < 2) throw StabforgeError("induction identity needs at least two curve factors");
  std::vector<int> head(genera.begin(), genera.end() - 1);
  auto base_space = ProductSpace::from_genera(head);
  std::string name = "C" + std::to_string(genera.size());
  return run_induction(w, b, base_space, CurveFactor{name, genera.back(), name}, shift_override);
}

InductionReport verify_induction_identity(const Rational& w, const Rational& b, std::size_t k,
                                          std::optional<Rational> shift_override) {
  return run_induction(w, b, ProductSpace::elliptic(k), CurveFactor{"E" + std::to_string(k + 1), 1, "E"},
                       shift_override);
}

CompatibilityReport numerical_compatibility_check(const Charge& ambient, const Charge& base,
                                                  const FiberInclusionSpec& inclusion) {
  require_same_space(charge_space(ambient), inclusion.ambient(), "numerical_compatibility_check");
  require_same_space(charge_space(base), inclusion.base(), "numerical_compatibility_check");
  CompatibilityReport r;
  for (const auto& m : monomial_basis(*inclusion.base())) {
    GradedClass v = GradedClass::monomial(inclusion.base(), m);
    GaussianRational za = evaluate(ambient, fiber_pushforward(v, inclusion));
    GaussianRational zb = evaluate(base, v);
    ++r.checked;
    if (!(za == zb)) {
      r.holds = false;
      r.witness = m;
      r.ambient_value = za;
      r.base_value = zb;
      break;
    }
  }
  return r;
}

bool in_principal_half_plane(const GaussianRational& z) {
  return sgn(z.im()) > 0 || (sgn(z.im()) == 0 && sgn(z.re()) < 0);
}

int compare_phase(const GaussianRational& z1, long s1, const GaussianRational& z2, long s2) {
  if (s1 != s2) return s1 > s2 ? 1 : -1;
  int c = sgn(cross(z2, z1));
  return c > 0 ? 1 : c < 0 ? -1 : 0;
}

HNPolygon hn_polygon(const Charge& z, std::span<const HNFactor> factors) {
  std::vector<GaussianRational> base(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    base[i] = evaluate(z, factors[i].cls);
    if (base[i].is_zero()) throw StabforgeError("hn_polygon: factor " + std::to_string(i) + " has zero charge");
    if (!in_principal_half_plane(base[i]))
      throw StabforgeError("hn_polygon: charge of factor " + std::to_string(i) +
                           " is outside the phase (0,1] half-plane; pass a shifted representative");
  }
  std::vector<std::size_t> order(factors.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return compare_phase(base[i], factors[i].shift, base[j], factors[j].shift) > 0;
  });

  HNPolygon poly;
  for (auto i : order) {
    GaussianRational contribution = (factors[i].shift % 2 == 0) ? base[i] : -base[i];
    if (!poly.segments.empty()) {
      auto& last = poly.segments.back();
      if (compare_phase(last.base_charge, last.shift, base[i], factors[i].shift) == 0) {
        last.factors.push_back(i);
        last.charge += contribution;
        continue;
      }
    }
    poly.segments.push_back({{i}, base[i], factors[i].shift, contribution});
  }
  std::vector<GaussianRational> steps;
  for (const auto& s : poly.segments) steps.push_back(s.charge);
  poly.vertices = path_vertices(steps);
  for (std::size_t k = 1; k < steps.size(); ++k)
    if (sgn(cross(steps[k - 1], steps[k])) >= 0) poly.concave = false;
  poly.single_factor = poly.segments.size() == 1;
  return poly;
}

std::vector<GaussianRational> path_vertices(std::span<const GaussianRational> steps) {
  std::vector<GaussianRational> v{GaussianRational()};
  for (const auto& s : steps) v.push_back(v.back() + s);
  return v;
}

bool weakly_dominates(const HNPolygon& polygon, std::span<const GaussianRational> points) {
  const auto& vs = polygon.vertices;
  for (std::size_t k = 1; k < vs.size(); ++k) {
    GaussianRational edge = vs[k] - vs[k - 1];
    for (const auto& p : points)
      if (sgn(cross(edge, p - vs[k - 1])) > 0) return false;
  }
  return true;
}

}  // namespace stabforge

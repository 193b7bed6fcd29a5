#include "stabforge/orbifold.hpp"
#include <set>

#include <doctest.h>

using namespace stabforge;

namespace {

TangentSignature sig3(std::size_t n, std::vector<int> nz) { return TangentSignature::padded(3, n, std::move(nz)); }
TangentSignature sig2(std::size_t n, std::vector<int> nz) { return TangentSignature::padded(2, n, std::move(nz)); }

const Stratum* find(const StageState& s, const std::string& label) {
  for (const auto& st : s.strata)
    if (st.label == label) return &st;
  return nullptr;
}

}  // namespace

TEST_CASE("signatures and the SL condition") {
  CHECK(sl_condition(sig2(3, {1, 1})));
  CHECK(sl_condition(sig3(4, {1, 2})));
  CHECK_FALSE(sl_condition(sig3(2, {1})));
  CHECK(sl_condition(sig3(3, {2, 2, 2})));
  CHECK(TangentSignature(3, {5, -1, 0}).exponents == std::vector<int>{0, 2, 2});
  CHECK(sig3(3, {2, 2}).str() == "diag(1,z^2,z^2)");
  CHECK(sig2(2, {1}).str() == "diag(1,-1)");
  CHECK(sig3(4, {2, 2}).codim() == 2);
}

TEST_CASE("cluster classification") {
  auto p1 = classify_clusters(sig2(3, {1, 1}));
  CHECK(p1.kind == "P1");
  CHECK(p1.fiber_dim == 1);
  auto pq = classify_clusters(sig3(3, {1, 2}));
  CHECK(pq.kind == "P_union_Q");
  CHECK(pq.fiber_dim == 1);
  auto p2 = classify_clusters(sig3(4, {2, 2, 2}));
  CHECK(p2.kind == "P2");
  CHECK(p2.fiber_dim == 2);
  try {
    classify_clusters(sig3(3, {1, 1}));
    FAIL("expected an error");
  } catch (const StabforgeError& e) {
    CHECK(std::string(e.what()).find("diag(1,z,z)") != std::string::npos);
  }
}

TEST_CASE("parameter action reproduces the five tangent claims") {
  for (std::size_t n = 2; n <= 6; ++n) {
    auto pq = sig3(n, {1, 2});
    CHECK(parameter_action("P_inf", pq) == sig3(n, {1}));
    CHECK(parameter_action("Q_inf", pq) == sig3(n, {1}));
    CHECK(parameter_action("P_0", pq) == sig3(n, {2, 2}));
    if (n >= 3) {
      auto r = sig3(n, {2, 2, 2});
      CHECK(parameter_action("R_0w", r) == sig3(n, {1}));
      CHECK(parameter_action("R_inf", r) == sig3(n, {2, 2}));
    }
  }
  CHECK_THROWS_AS(parameter_action("R_inf", sig3(3, {1, 2})), StabforgeError);
  CHECK_THROWS_AS(parameter_action("P_inf", sig2(3, {1, 1})), StabforgeError);
}

TEST_CASE("chart exponents follow the substitution rule") {
  // (x1^3, eps x1^2 - x2) -> (x1^3, eps zeta x1^2 - x2) when x2 -> zeta^2 x2
  IdealChart p_inf{{{3, 0}, std::nullopt}, {{0, 1}, std::vector<int>{2, 0}}};
  CHECK(chart_parameter_exponents(p_inf, {0, 1}, 3) == std::vector<int>{1});
  // with no action the parameter is fixed
  CHECK(chart_parameter_exponents(p_inf, {0, 0}, 3) == std::vector<int>{0});
}

TEST_CASE("property: P/Q symmetry under renaming x1 <-> x2 with swapped exponents") {
  IdealChart p_inf{{{3, 0}, std::nullopt}, {{0, 1}, std::vector<int>{2, 0}}};
  IdealChart q_inf{{{0, 3}, std::nullopt}, {{1, 0}, std::vector<int>{0, 2}}};
  IdealChart p0_p{{{1, 1}, std::nullopt}, {{0, 2}, std::nullopt}, {{2, 0}, std::vector<int>{0, 1}}};
  IdealChart p0_q{{{1, 1}, std::nullopt}, {{2, 0}, std::nullopt}, {{0, 2}, std::vector<int>{1, 0}}};
  for (int m : {2, 3, 4, 5})
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        CHECK(chart_parameter_exponents(p_inf, {a, b}, m) == chart_parameter_exponents(q_inf, {b, a}, m));
        CHECK(chart_parameter_exponents(p0_p, {a, b}, m) == chart_parameter_exponents(p0_q, {b, a}, m));
      }
}

TEST_CASE("bkr dimension bound") {
  EvenStratum a;
  a.dim = 1;
  a.clusters.fiber_dim = 1;
  EvenStratum b;
  b.dim = 0;
  b.clusters.fiber_dim = 2;
  auto r = bkr_dimension_bound(3, {a, b});
  CHECK(r.computed == 4);
  CHECK(r.bound == 4);
  CHECK(r.pass);
  EvenStratum bad;
  bad.dim = 4;
  bad.clusters.fiber_dim = 2;
  auto f = bkr_dimension_bound(5, {bad});
  CHECK(f.computed == 8);
  CHECK_FALSE(f.pass);
  CHECK(bkr_dimension_bound(3, {}).computed == 3);
}

TEST_CASE("Z/2 steps") {
  auto s1 = initial_state(2, true);
  auto r = z2_step(s1);
  CHECK(r.next.n == 2);
  REQUIRE(r.next.strata.size() == 1);
  CHECK(r.next.strata[0].label == "B1");
  CHECK(r.next.strata[0].dim == 1);
  CHECK(r.next.strata[0].sig == sig2(2, {1}));
  REQUIRE(r.audit.even_strata.size() == 1);
  CHECK(r.audit.even_strata[0].clusters.fiber_dim == 1);
  CHECK(r.audit.bkr.computed == 2);
  CHECK(r.audit.bkr.bound == 3);
  CHECK(r.audit.pass);

  auto r2 = z2_step(r.next);
  CHECK(r2.audit.pass);
  CHECK(r2.audit.bkr.computed == 3);

  StageState bad = r.next;
  bad.strata.push_back({"B2", 0, sig2(2, {1, 1}), {{"B2o", "bad", 0, sig2(2, {1, 1}), std::nullopt}}});
  CHECK_THROWS_AS(z2_step(bad), StabforgeError);
  CHECK_THROWS_AS(z3_step(r.next), StabforgeError);
}

TEST_CASE("Z/3 steps") {
  auto s1 = initial_state(3);
  CHECK(find(s1, "B2") == nullptr);
  auto r = z3_step(s1);
  const auto* b1 = find(r.next, "B1");
  const auto* b2 = find(r.next, "B2");
  REQUIRE(b1);
  REQUIRE(b2);
  CHECK(b1->dim == 1);
  CHECK(b1->sig == sig3(2, {1}));
  CHECK(b2->dim == 0);
  CHECK(b2->sig == sig3(2, {2, 2}));
  // no codimension-2 stratum on X_1, so the count stops at 2 here
  CHECK(r.audit.bkr.computed == 2);
  CHECK_FALSE(r.audit.dimension_equality);

  auto r3 = z3_step(r.next);
  CHECK(r3.audit.bkr.computed == 4);  // max{3, 1 + 2, 0 + 4}
  CHECK(r3.audit.bkr.bound == 4);
  CHECK(r3.audit.dimension_equality);
  CHECK(r3.audit.pass);
  REQUIRE(r3.audit.even_strata.size() == 2);
  CHECK(r3.audit.even_strata[0].contribution == 3);
  CHECK(r3.audit.even_strata[1].contribution == 4);
  // piece families present at stage 3
  std::set<std::string> fams;
  for (const auto& st : r3.next.strata)
    for (const auto& p : st.pieces) fams.insert(p.family);
  CHECK(fams == std::set<std::string>{"B1o", "B1'", "B1''", "B2o", "B2'", "B2dagger"});
}

TEST_CASE("towers") {
  auto t2 = run_tower(2, 8);
  CHECK(t2.stages.size() == 8);
  CHECK(t2.pass);
  for (std::size_t i = 0; i < t2.audits.size(); ++i) {
    const auto& a = t2.audits[i];
    std::size_t k = a.from_n;
    for (const auto& e : a.even_strata) CHECK(e.sl);
    CHECK(a.bkr.computed == k + 1);
    CHECK(a.bkr.computed < k + 2);
    const auto& s = t2.stages[i + 1];
    REQUIRE(s.strata.size() == 1);
    CHECK(s.strata[0].sig == sig2(s.n, {1}));
    CHECK(s.strata[0].dim == s.n - 1);
  }

  auto t3 = run_tower(3, 6);
  CHECK(t3.stages.size() == 6);
  CHECK(t3.pass);
  for (const auto& a : t3.audits) {
    for (const auto& e : a.even_strata) CHECK(e.sl);
    for (const auto& c : a.claims) CHECK(c.match);
    CHECK(a.bkr.pass);
    if (a.from_n >= 2) CHECK(a.dimension_equality);
  }
  for (const auto& s : t3.stages)
    for (const auto& st : s.strata) {
      bool ok = st.sig == sig3(s.n, {1}) || st.sig == sig3(s.n, {2, 2});
      CHECK(ok);
      CHECK(st.dim + st.sig.codim() == s.n);
    }

  try {
    run_tower(4, 3);
    FAIL("expected rejection");
  } catch (const StabforgeError& e) {
    CHECK(std::string(e.what()).find("unsupported: dimension condition of BKR fails") != std::string::npos);
  }
  CHECK_THROWS_AS(run_tower(5, 3), StabforgeError);
  CHECK_THROWS_AS(run_tower(3, 0), StabforgeError);
}

TEST_CASE("counting mode") {
  auto t = run_tower(3, 3, true);
  const auto* b1 = find(t.stages[0], "B1");
  REQUIRE(b1);
  CHECK(*b1->pieces[0].components == 3);
  auto t2 = run_tower(2, 2, true);
  CHECK(*t2.stages[0].strata[0].pieces[0].components == 4);
  // B2 of X_2 for Z/3: one planar point over each of the 3 x 3 fixed points
  const auto* b2 = find(t.stages[1], "B2");
  REQUIRE(b2);
  CHECK(*b2->pieces[0].components == 9);
  CHECK_FALSE(run_tower(3, 2).stages[0].strata[0].pieces[0].components.has_value());
}

TEST_CASE("Z/3 cluster enumeration") {
  auto comps = enumerate_z3_clusters(sig3(2, {1, 2}));
  REQUIRE(comps.size() == 3);
  CHECK(comps[0].name == "P");
  CHECK(comps[1].name == "Q");
  CHECK(comps[2].name == "planar");
  CHECK(comps[0].dim == 1);
  CHECK(comps[1].dim == 1);
  CHECK(comps[2].dim == 0);
  CHECK(comps[2].ideal == "(x1*x2, x2^2, x1^2)");
  for (const auto& c : comps) CHECK(c.quotient_characters == std::vector<int>{0, 1, 2});
  // agrees with classify_clusters
  auto f = classify_clusters(sig3(2, {1, 2}));
  CHECK(f.fiber_dim == std::max(comps[0].dim, comps[1].dim));
  auto lin = enumerate_z3_clusters(sig3(3, {2, 2, 2}));
  REQUIRE(lin.size() == 1);
  CHECK(lin[0].dim == 2);
  CHECK_THROWS_AS(enumerate_z3_clusters(sig3(2, {1, 1})), StabforgeError);
}

TEST_CASE("tower json") {
  auto j = tower_to_json(run_tower(3, 3));
  CHECK(j["pass"] == true);
  CHECK(j["stages"].size() == 3);
  CHECK(j["audits"][1]["bkr"]["computed"] == 4);
}

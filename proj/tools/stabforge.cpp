// stabforge: command-line front-end for scenarios, the verification matrix,
// Cynk-Hulek towers, fiber restriction and support constants.
//
// Exit codes: 0 every check passed, 1 some check failed, 2 usage, schema or
// evaluation error.

#include "stabforge/descent.hpp"
#include "stabforge/orbifold.hpp"
#include "stabforge/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace stabforge;

namespace {

constexpr int kUsageError = 2;

void write_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw StabforgeError("cannot write " + path);
  out << j.dump(2) << '\n';
}

/// "a,b;c,d" -> rows of rationals.
std::vector<std::vector<Rational>> parse_rows(const std::string& text) {
  std::vector<std::vector<Rational>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::vector<Rational> values;
    std::stringstream cs(row);
    std::string cell;
    while (std::getline(cs, cell, ',')) values.push_back(parse_rational(cell));
    rows.push_back(std::move(values));
  }
  return rows;
}

int cmd_run(const std::vector<std::string>& files, bool json, const std::string& report_path) {
  std::vector<Scenario> scenarios;
  for (const auto& f : files) scenarios.push_back(load_scenario(f));
  std::vector<ScenarioReport> reports(scenarios.size());
  parallel_for(scenarios.size(), worker_limit(), [&](std::size_t i) { reports[i] = run_scenario(scenarios[i]); });

  Json out = Json::array();
  for (const auto& r : reports) out.push_back(report_to_json(r));
  Json doc = reports.size() == 1 ? out[0] : out;
  if (!report_path.empty()) write_file(report_path, doc);
  if (json)
    std::cout << doc.dump(2) << '\n';
  else
    for (const auto& r : reports) std::cout << report_to_text(r);

  int code = 0;
  for (const auto& r : reports) {
    if (r.status == "error") return kUsageError;
    if (!r.passed()) code = 1;
  }
  return code;
}

int cmd_matrix(const std::string& only, bool json) {
  auto rows = run_matrix(only.empty() ? std::nullopt : std::optional<std::string>(only));
  auto doc = matrix_to_json(rows);
  if (json)
    std::cout << doc.dump(2) << '\n';
  else
    std::cout << matrix_to_text(rows);
  return doc["status"] == "pass" ? 0 : 1;
}

int cmd_tower(int m, std::size_t depth, bool counting, bool json, const std::string& report_path) {
  auto tower = run_tower(m, depth, counting);
  auto doc = tower_to_json(tower);
  if (!report_path.empty()) write_file(report_path, doc);
  if (json) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << "Z/" << m << " tower to X_" << depth << (counting ? " (counting)" : "") << '\n';
    for (const auto& a : tower.audits) {
      std::cout << "  X_" << a.from_n << " -> X_" << a.from_n + 1 << ": BKR " << a.bkr.computed
                << " <= " << a.bkr.bound << (a.dimension_equality ? " (= k+2)" : "");
      std::size_t ok = 0;
      for (const auto& c : a.claims) ok += c.match;
      if (!a.claims.empty()) std::cout << ", claims " << ok << "/" << a.claims.size();
      std::cout << "  " << (a.pass ? "pass" : "FAIL") << '\n';
    }
    std::cout << (tower.pass ? "PASS" : "FAIL") << '\n';
  }
  return tower.pass ? 0 : 1;
}

int cmd_restrict(std::size_t elliptic, const std::vector<int>& genera, const std::vector<std::size_t>& collapse,
                 const std::string& w_text, const std::string& b_text, const std::string& source_kind, bool saturate,
                 bool json) {
  Rational w = parse_rational(w_text), b = parse_rational(b_text);
  SpacePtr space = genera.empty() ? ProductSpace::elliptic(elliptic) : ProductSpace::from_genera(genera);
  FiberInclusionSpec inc(space, collapse);
  Charge z = exp_charge(space, w, b);
  std::optional<std::vector<GradedClass>> source;
  if (source_kind == "even") {
    source.emplace();
    for (const auto& mono : monomial_basis(*inc.base())) {
      bool even = std::all_of(mono.codes().begin(), mono.codes().end(),
                              [](auto c) { return code_degree(c) % 2 == 0; });
      if (even) source->push_back(GradedClass::monomial(inc.base(), mono));
    }
  }
  auto r = restrict_charge(z, inc, source, std::nullopt, saturate);
  auto base = exp_charge(inc.base(), w, b);
  bool matches = r.charge.kernel() == base.kernel();
  auto compat = numerical_compatibility_check(z, base, inc);
  bool pass = matches && compat.holds;
  Json doc = {{"ambient", space_to_json(*space)},
              {"base", space_to_json(*inc.base())},
              {"w", to_string(w)},
              {"b", to_string(b)},
              {"restricted_kernel", class_to_json(r.charge.kernel())},
              {"kernel_matches_base_exp", matches},
              {"compatibility_checked", compat.checked},
              {"lambda0", r.lambda0.to_json()},
              {"saturated", saturate},
              {"status", pass ? "pass" : "fail"}};
  if (json) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << "restriction to " << inc.base()->dimension() << "-dimensional fiber, (w,b)=(" << to_string(w)
              << "," << to_string(b) << ")\n"
              << "  Z_0 kernel: " << r.charge.kernel().str() << '\n'
              << "  equals the base exponential charge: " << (matches ? "yes" : "no") << '\n'
              << "  Z(i_* v) = Z_0(v) on " << compat.checked << " basis classes: " << (compat.holds ? "yes" : "no")
              << '\n'
              << "  image lattice" << (saturate ? " (saturated)" : "") << ": rank " << r.lambda0.rank()
              << ", denominator " << r.lambda0.denominator.get_str() << '\n';
    for (std::size_t c = 0; c < r.lambda0.matrix.cols(); ++c) {
      std::cout << "    " << r.lambda0.source_labels[c] << " =";
      for (std::size_t row = 0; row < r.lambda0.matrix.rows(); ++row) {
        const auto& x = r.lambda0.matrix.at(row, c);
        if (x != 0) std::cout << ' ' << (x > 0 ? "+" : "") << x.get_str() << '*' << r.lambda0.target_labels[row];
      }
      std::cout << '\n';
    }
    std::cout << (pass ? "PASS" : "FAIL") << '\n';
  }
  return pass ? 0 : 1;
}

int cmd_support(const std::string& w_text, const std::string& b_text, const std::string& classes_text,
                const std::string& gram_text, bool odd, bool json) {
  auto e = ProductSpace::elliptic(1);
  std::vector<GradedClass> basis{GradedClass::unit(e), GradedClass::point(e, 0)};
  if (odd) basis.push_back(GradedClass::odd(e, 0, 1));
  auto classes = parse_rows(classes_text);
  for (const auto& c : classes)
    if (c.size() != basis.size()) throw StabforgeError("each class needs " + std::to_string(basis.size()) + " coordinates");
  std::vector<std::vector<Rational>> gram;
  if (gram_text.empty()) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      gram.emplace_back(basis.size(), Rational(0));
      gram.back()[i] = 1;
    }
  } else {
    gram = parse_rows(gram_text);
  }
  Charge z = exp_charge(e, parse_rational(w_text), parse_rational(b_text));
  auto r = effective_support_constant(z, basis, gram, classes);
  auto doc = support_report_to_json(r);
  if (json) {
    std::cout << doc.dump(2) << '\n';
  } else if (r.infinite) {
    std::cout << "C^2 = infinite (class " << *r.witness << " lies in ker Z)\n";
  } else {
    std::cout << "C^2 = " << to_string(r.c_squared) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stabforge: exact checks for central charges on products of curves"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  bool run_json = false;
  std::string run_report;
  auto* run = app.add_subcommand("run", "run scenario files (in parallel when several are given)");
  run->add_option("files", files, "scenario JSON files")->required()->check(CLI::ExistingFile);
  run->add_flag("--json", run_json, "print the JSON report instead of text");
  run->add_option("--report", run_report, "also write the JSON report to this file");

  std::string only;
  bool matrix_json = false;
  auto* matrix = app.add_subcommand("matrix", "run the bundled verification matrix");
  matrix->add_option("--only", only, "keep rows with this tag");
  matrix->add_flag("--json", matrix_json, "print JSON");

  int m = 2;
  std::size_t depth = 1;
  bool counting = false, tower_json = false;
  std::string tower_report;
  auto* tower = app.add_subcommand("ch-tower", "audit a Cynk-Hulek tower");
  tower->add_option("--m", m, "group order (2 or 3)")->required();
  tower->add_option("--depth", depth, "last stage X_depth")->required()->check(CLI::Range(1, 12));
  tower->add_flag("--counting", counting, "carry component counts (E = C[3], fix = 4 or 3)");
  tower->add_flag("--json", tower_json, "print JSON");
  tower->add_option("--report", tower_report, "write the JSON tower report to this file");

  std::size_t elliptic = 2;
  std::vector<int> genera;
  std::vector<std::size_t> collapse{1};
  std::string rw = "1", rb = "0";
  std::string source_kind = "full";
  bool saturate = false, restrict_json = false;
  auto* restrict = app.add_subcommand("restrict", "restrict an exponential charge to a point fiber");
  restrict->add_option("--elliptic", elliptic, "number of elliptic factors")->check(CLI::Range(1, 6));
  restrict->add_option("--genera", genera, "curve genera instead of elliptic factors")->delimiter(',');
  restrict->add_option("--collapse", collapse, "factor indices collapsed to a point")->delimiter(',');
  restrict->add_option("--w", rw, "w > 0 as p/q");
  restrict->add_option("--b", rb, "b as p/q");
  restrict->add_option("--source", source_kind, "source classes: full monomial basis or even monomials")
      ->check(CLI::IsMember({"full", "even"}));
  restrict->add_flag("--saturate", saturate, "saturate the image lattice");
  restrict->add_flag("--json", restrict_json, "print JSON");

  std::string sw = "1", sb = "0", classes = "1,0;0,1;1,1;1,-1;2,1", gram;
  bool odd = false, support_json = false;
  auto* support = app.add_subcommand("support", "support constant of Z_1^{w,b} on classes over (r, d)");
  support->add_option("--w", sw, "w > 0 as p/q");
  support->add_option("--b", sb, "b as p/q");
  support->add_option("--classes", classes, "coordinate rows \"r,d;r,d;...\"");
  support->add_option("--gram", gram, "gram rows (default identity)");
  support->add_flag("--odd", odd, "add an odd class e1 as a third coordinate");
  support->add_flag("--json", support_json, "print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*run) return cmd_run(files, run_json, run_report);
    if (*matrix) return cmd_matrix(only, matrix_json);
    if (*tower) return cmd_tower(m, depth, counting, tower_json, tower_report);
    if (*restrict) return cmd_restrict(elliptic, genera, collapse, rw, rb, source_kind, saturate, restrict_json);
    if (*support) return cmd_support(sw, sb, classes, gram, odd, support_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

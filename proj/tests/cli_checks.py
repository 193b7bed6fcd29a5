"""End-to-end checks of the stabforge CLI: schema validation of scenarios and
reports, determinism of reports, exit codes and error messages.

Usage: cli_checks.py --bin path/to/stabforge --root repo_root [unittest args]
"""

import argparse
import json
import os
import re
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema

BIN = None
ROOT = None


def schema(name):
    with open(ROOT / "schemas" / f"{name}.schema.json") as f:
        s = json.load(f)
    jsonschema.Draft202012Validator.check_schema(s)
    return jsonschema.Draft202012Validator(s)


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("STABFORGE_THREADS", None)
    if env:
        full_env.update(env)
    return subprocess.run([str(BIN), *args], capture_output=True, text=True, env=full_env, timeout=600)


def strip_timing(text):
    return re.sub(r'"elapsed_ms": [0-9.eE+-]+', '"elapsed_ms": 0', text)


def bundled():
    return sorted((ROOT / "scenarios").glob("*.json"))


class Schemas(unittest.TestCase):
    def test_bundled_scenarios_validate(self):
        v = schema("scenario")
        files = bundled()
        self.assertGreaterEqual(len(files), 2)
        for f in files:
            with self.subTest(file=f.name):
                v.validate(json.loads(f.read_text()))

    def test_malformed_genus_fails_schema(self):
        doc = json.loads((ROOT / "tests/data/genus0_induction.json").read_text())
        errors = list(schema("scenario").iter_errors(doc))
        self.assertTrue(errors)

    def test_floats_are_not_rationals(self):
        doc = json.loads((ROOT / "scenarios/support_e1.json").read_text())
        doc["charge"]["w"] = 0.5
        self.assertTrue(list(schema("scenario").iter_errors(doc)))


class Scenarios(unittest.TestCase):
    def test_bundled_scenarios_pass_and_reports_validate(self):
        v = schema("report")
        for f in bundled():
            with self.subTest(file=f.name):
                r = run("run", "--json", str(f))
                self.assertEqual(r.returncode, 0, r.stdout + r.stderr)
                report = json.loads(r.stdout)
                v.validate(report)
                self.assertEqual(report["status"], "pass")
                self.assertTrue(all(s["status"] == "pass" for s in report["steps"]))

    def test_kummer_covers_invariance_and_restriction(self):
        report = json.loads(run("run", "--json", str(ROOT / "scenarios/kummer_n2.json")).stdout)
        steps = {s["step"]: s for s in report["steps"]}
        self.assertTrue(steps["invariance"]["result"]["holds"])
        self.assertTrue(steps["restrict"]["result"]["kernel_matches_base_exp"])
        self.assertTrue(steps["numerical_compatibility"]["result"]["checks"][0]["holds"])

    def test_ch_z3_tower_audit(self):
        report = json.loads(run("run", "--json", str(ROOT / "scenarios/ch_z3_depth6.json")).stdout)
        tower = next(s for s in report["steps"] if s["step"] == "ch_tower")["result"]
        self.assertEqual(tower["depth"], 6)
        self.assertEqual(len(tower["audits"]), 5)
        self.assertTrue(all(a["pass"] for a in tower["audits"]))

    def test_several_files_run_together(self):
        files = [str(f) for f in bundled()[:3]]
        r = run("run", "--json", *files, env={"STABFORGE_THREADS": "2"})
        self.assertEqual(r.returncode, 0, r.stderr)
        reports = json.loads(r.stdout)
        schema("report").validate(reports)
        self.assertEqual(len(reports), 3)

    def test_failure_carries_witness_and_skips(self):
        r = run("run", "--json", str(ROOT / "tests/data/failing_lift.json"))
        self.assertEqual(r.returncode, 1)
        report = json.loads(r.stdout)
        schema("report").validate(report)
        self.assertEqual([s["status"] for s in report["steps"]], ["pass", "fail", "skipped"])
        self.assertEqual(report["steps"][1]["witness"]["difference"][0]["factors"], ["pt", "1"])

    def test_genus_zero_rejected_with_position(self):
        r = run("run", str(ROOT / "tests/data/genus0_induction.json"))
        self.assertEqual(r.returncode, 2)
        self.assertIn("genus >= 1 required", r.stderr)
        self.assertIn("/pipeline/0/genera/1", r.stderr)

    def test_bad_generator_rejected_with_position(self):
        r = run("run", str(ROOT / "tests/data/bad_aut.json"))
        self.assertEqual(r.returncode, 2)
        self.assertIn("/group/generators/0", r.stderr)

    def test_schema_errors_are_position_annotated(self):
        doc = json.loads((ROOT / "scenarios/restriction.json").read_text())
        doc["pipeline"][2]["saturate"] = "yes"
        doc["pipeline"][0]["bogus"] = 1
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
            json.dump(doc, f)
        try:
            r = run("run", f.name)
            self.assertEqual(r.returncode, 2)
            self.assertIn("/pipeline/0/bogus", r.stderr)
            doc["pipeline"][0].pop("bogus")
            Path(f.name).write_text(json.dumps(doc))
            r = run("run", f.name)
            self.assertIn("/pipeline/2/saturate: expected a boolean", r.stderr)
            Path(f.name).write_text('{"name": "x", ')
            r = run("run", f.name)
            self.assertEqual(r.returncode, 2)
            self.assertIn("byte", r.stderr)
        finally:
            os.unlink(f.name)


class Determinism(unittest.TestCase):
    def test_reports_identical_modulo_timing(self):
        for name in ["kummer_n2.json", "ch_z3_depth6.json", "induction.json"]:
            with self.subTest(file=name):
                a = run("run", "--json", str(ROOT / "scenarios" / name))
                b = run("run", "--json", str(ROOT / "scenarios" / name), env={"STABFORGE_THREADS": "3"})
                self.assertEqual(strip_timing(a.stdout), strip_timing(b.stdout))

    def test_matrix_identical_across_thread_caps(self):
        a = run("matrix", "--only", "ch", "--json", env={"STABFORGE_THREADS": "1"})
        b = run("matrix", "--only", "ch", "--json", env={"STABFORGE_THREADS": "4"})
        self.assertEqual(strip_timing(a.stdout), strip_timing(b.stdout))


class Matrix(unittest.TestCase):
    def test_full_matrix(self):
        r = run("matrix", "--json")
        self.assertEqual(r.returncode, 0, r.stdout)
        doc = json.loads(r.stdout)
        schema("matrix").validate(doc)
        self.assertEqual([row["tag"] for row in doc["rows"]],
                         ["induction", "kummer", "cy-even", "cy-odd", "ch", "ch", "restriction"])
        self.assertTrue(all(row["status"] == "pass" for row in doc["rows"]))

    def test_only_ch_gives_two_rows(self):
        doc = json.loads(run("matrix", "--only", "ch", "--json").stdout)
        self.assertEqual(len(doc["rows"]), 2)
        text = run("matrix", "--only", "ch").stdout
        self.assertEqual(len([l for l in text.splitlines() if l.startswith("PASS")]), 2)

    def test_unknown_tag_and_bad_thread_cap(self):
        self.assertEqual(run("matrix", "--only", "nope").returncode, 2)
        r = run("matrix", "--only", "ch", env={"STABFORGE_THREADS": "zero"})
        self.assertEqual(r.returncode, 2)
        self.assertIn("STABFORGE_THREADS", r.stderr)


class Cli(unittest.TestCase):
    def test_tower_report_validates(self):
        v = schema("tower")
        for m, depth in [(2, 8), (3, 6)]:
            with tempfile.TemporaryDirectory() as d:
                out = Path(d) / "tower.json"
                r = run("ch-tower", "--m", str(m), "--depth", str(depth), "--report", str(out))
                self.assertEqual(r.returncode, 0, r.stderr)
                doc = json.loads(out.read_text())
                v.validate(doc)
                self.assertTrue(doc["pass"])
                self.assertEqual(len(doc["stages"]), depth)

    def test_z4_rejected(self):
        r = run("ch-tower", "--m", "4", "--depth", "3")
        self.assertEqual(r.returncode, 2)
        self.assertIn("unsupported: dimension condition of BKR fails", r.stderr)

    def test_restrict(self):
        doc = json.loads(run("restrict", "--source", "even", "--json").stdout)
        self.assertEqual(doc["lambda0"]["rank"], 2)
        self.assertTrue(doc["kernel_matches_base_exp"])
        full = json.loads(run("restrict", "--json", "--w", "1/2", "--b", "3").stdout)
        self.assertEqual(full["lambda0"]["rank"], 4)
        self.assertEqual(full["status"], "pass")

    def test_support(self):
        doc = json.loads(run("support", "--json").stdout)
        self.assertEqual(doc["constant_squared"], "1")
        doc = json.loads(run("support", "--odd", "--classes", "1,0,0;0,0,1", "--json").stdout)
        self.assertEqual(doc["constant_squared"], "infinite")
        self.assertEqual(doc["witness"], 1)

    def test_usage_error(self):
        self.assertEqual(run().returncode, 2)
        self.assertEqual(run("ch-tower", "--m", "2").returncode, 2)


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--bin", required=True)
    parser.add_argument("--root", required=True)
    args, rest = parser.parse_known_args()
    BIN = Path(args.bin).resolve()
    ROOT = Path(args.root).resolve()
    unittest.main(argv=[sys.argv[0], *rest], verbosity=2)

"""End-to-end checks of the mat2gen executable: exit codes, outputs, schemas."""

import json
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

CLI, SCHEMAS, SAMPLES = sys.argv[1:4]


def load_schema(name):
    with open(os.path.join(SCHEMAS, name)) as f:
        return json.load(f)


REPORT = jsonschema.Draft202012Validator(load_schema("report.schema.json"))
DOCUMENT = jsonschema.Draft202012Validator(load_schema("tuple_document.schema.json"))


def sample(name):
    return os.path.join(SAMPLES, name)


def run(*args, stdin=None):
    p = subprocess.run([CLI, *args], input=stdin, capture_output=True, text=True, timeout=600)
    return p.returncode, p.stdout, p.stderr


def report(*args, expect=0):
    code, out, err = run(*args)
    if code != expect:
        raise AssertionError(f"{args}: exit {code}, expected {expect}\n{err}")
    rep = json.loads(out)
    REPORT.validate(rep)
    return rep


def document(text):
    doc = json.loads(text)
    DOCUMENT.validate(doc)
    return doc


def strip_time(text):
    rep = json.loads(text)
    rep["timestamp"] = ""
    return json.dumps(rep)


class Check(unittest.TestCase):
    def test_generating_pair(self):
        rep = report("check", sample("generating_pair.json"))
        r = rep["results"]
        self.assertEqual(r["stratum"], "GENERATING")
        self.assertTrue(r["generates"])
        self.assertEqual(r["span_dim"], 4)
        self.assertTrue(r["friedland"]["generates"])
        self.assertEqual(r["friedland"]["lhs"], [0.0, 0.0])
        self.assertEqual(r["friedland"]["rhs"], [16.0, 0.0])
        self.assertEqual(r["common_eigenline"], {"status": "NONE"})
        self.assertEqual(rep["flags"], [])
        self.assertIsNone(rep["seed"])

    def test_scalar_tuple(self):
        r = report("check", sample("scalar_triple.json"))["results"]
        self.assertEqual(r["stratum"], "COMMUTING")
        self.assertEqual(r["common_eigenline"]["status"], "ALL_LINES")
        self.assertNotIn("friedland", r)

    def test_eigen_shared(self):
        rep = report("check", sample("eigen_shared.json"))
        self.assertEqual(rep["results"]["stratum"], "EIGEN_SHARED")
        self.assertEqual(rep["results"]["common_eigenline"]["line"], [[1.0, 0.0], [0.0, 0.0]])
        self.assertFalse(rep["results"]["friedland"]["generates"])
        self.assertIn("LOW_CONFIDENCE", rep["flags"])

    def test_commuting_non_scalar(self):
        r = report("check", sample("nilpotent_commuting.json"))["results"]
        self.assertEqual(r["stratum"], "COMMUTING")
        self.assertEqual(r["common_eigenline"]["status"], "LINE")

    def test_exact_document(self):
        rep = report("check", sample("exact_pair.json"))
        self.assertEqual(rep["results"]["backend"], "gaussian-rational")
        self.assertEqual(rep["results"]["stratum"], "GENERATING")
        # (2 Tr A1A2 - Tr A1 Tr A2)^2 = (6i)^2
        self.assertEqual(rep["results"]["friedland"]["lhs"], {"re": "-36", "im": "0"})

    def test_stdin(self):
        with open(sample("generating_pair.json")) as f:
            text = f.read()
        code, out, _ = run("check", "-", stdin=text)
        self.assertEqual(code, 0)
        a = json.loads(out)
        b = report("check", sample("generating_pair.json"))
        self.assertEqual(a["inputs_digest"], b["inputs_digest"])
        self.assertEqual(a["results"], b["results"])

    def test_single_matrix_flag(self):
        code, out, _ = run("check", "-", stdin='{"scalar":"float64","r":1,"matrices":[[[[1,0],[2,0]],[[0,0],[1,0]]]]}')
        self.assertEqual(code, 0)
        rep = json.loads(out)
        REPORT.validate(rep)
        self.assertIn("BELOW_MIN_ARITY", rep["flags"])

    def test_input_errors(self):
        code, _, err = run("check", sample("malformed.json"))
        self.assertEqual(code, 2)
        self.assertIn("line 4", err)
        self.assertIn("column", err)
        code, _, err = run("check", sample("wrong_length.json"))
        self.assertEqual(code, 2)
        self.assertIn("/matrices", err)
        self.assertEqual(run("check", sample("no_such_file.json"))[0], 2)
        self.assertEqual(run("check")[0], 2)
        self.assertEqual(run("frobnicate")[0], 2)
        self.assertEqual(run()[0], 2)

    def test_version(self):
        code, out, _ = run("--version")
        self.assertEqual(code, 0)
        self.assertIn("0.1.0", out)


class Invariants(unittest.TestCase):
    def test_generating_pair(self):
        r = report("invariants", sample("generating_pair.json"))["results"]
        inv = r["invariants"]
        self.assertEqual(inv["t1"], [[0.0, 0.0], [0.0, 0.0]])
        self.assertEqual(inv["t2"], [[2.0, 0.0], [2.0, 0.0]])
        self.assertEqual(inv["t11"], {"1,2": [0.0, 0.0]})
        self.assertEqual(inv["t111"], {})
        self.assertEqual(r["b2"], {"z1": [2.0, 0.0], "z2": [2.0, 0.0], "x": [0.0, 0.0]})

    def test_conjugate_has_same_invariants(self):
        a = report("invariants", sample("generating_pair.json"))["results"]
        b = report("invariants", sample("generating_pair_conjugate.json"))["results"]
        self.assertEqual(a["invariants"], b["invariants"])

    def test_triple(self):
        inv = report("invariants", sample("scalar_triple.json"))["results"]["invariants"]
        self.assertEqual(inv["t111"], {"1,2,3": [12.0, 0.0]})
        self.assertNotIn("b2", report("invariants", sample("scalar_triple.json"))["results"])


class Realize(unittest.TestCase):
    def test_float_round_trip(self):
        code, out, _ = run("realize", "--z1", "2", "--z2", "2", "--x", "0")
        self.assertEqual(code, 0)
        doc = document(out)
        with open(sample("generating_pair.json")) as f:
            self.assertEqual(doc, json.load(f))
        code, out2, _ = run("invariants", "-", stdin=out)
        self.assertEqual(json.loads(out2)["results"]["b2"], {"z1": [2.0, 0.0], "z2": [2.0, 0.0], "x": [0.0, 0.0]})

    def test_complex_values(self):
        code, out, _ = run("realize", "--z1", "1,2", "--z2", "-3", "--x", "0.5,-1")
        self.assertEqual(code, 0)
        doc = document(out)
        code, out2, _ = run("invariants", "-", stdin=out)
        b2 = json.loads(out2)["results"]["b2"]
        for key, want in (("z1", (1, 2)), ("z2", (-3, 0)), ("x", (0.5, -1))):
            self.assertAlmostEqual(b2[key][0], want[0], places=12)
            self.assertAlmostEqual(b2[key][1], want[1], places=12)
        self.assertEqual(doc["r"], 2)

    def test_exact(self):
        code, out, _ = run("realize", "--z1", "3", "--z2", "2", "--x", "1/2", "--backend", "gaussian-rational")
        self.assertEqual(code, 0)
        doc = document(out)
        self.assertEqual(doc["scalar"], "gaussian-rational")
        code, out2, _ = run("invariants", "-", stdin=out)
        b2 = json.loads(out2)["results"]["b2"]
        self.assertEqual(b2, {"z1": {"re": "3", "im": "0"}, "z2": {"re": "2", "im": "0"}, "x": {"re": "1/2", "im": "0"}})

    def test_exact_without_rational_chart(self):
        code, _, err = run("realize", "--z1", "3", "--z2", "5", "--x", "7", "--backend", "gaussian-rational")
        self.assertEqual(code, 1)
        self.assertIn("square", err)

    def test_bad_values(self):
        self.assertEqual(run("realize", "--z1", "two", "--z2", "2", "--x", "0")[0], 2)
        self.assertEqual(run("realize", "--z1", "1/0", "--z2", "2", "--x", "0", "--backend", "gaussian-rational")[0], 2)
        self.assertEqual(run("realize", "--z1", "1", "--z2", "2")[0], 2)
        self.assertEqual(run("realize", "--z1", "1", "--z2", "2", "--x", "0", "--backend", "float32")[0], 2)


class Semisimplify(unittest.TestCase):
    def test_upper_triangular(self):
        code, out, _ = run("semisimplify", sample("upper_triangular.json"))
        self.assertEqual(code, 0)
        doc = document(out)
        self.assertEqual(doc["matrices"], [
            [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [2.0, 0.0]]],
            [[[3.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [4.0, 0.0]]],
        ])

    def test_generating_unchanged(self):
        code, out, _ = run("semisimplify", sample("generating_pair.json"))
        with open(sample("generating_pair.json")) as f:
            self.assertEqual(document(out), json.load(f))

    def test_exact_unsupported(self):
        self.assertEqual(run("semisimplify", sample("exact_pair.json"))[0], 3)


class OrbitEq(unittest.TestCase):
    def test_conjugate(self):
        rep = report("orbit-eq", sample("generating_pair.json"), sample("generating_pair_conjugate.json"))
        r = rep["results"]
        self.assertTrue(r["equivalent"])
        self.assertEqual(r["kernel_dim"], 1)
        self.assertIsNotNone(r["conjugator"])
        self.assertLessEqual(rep["residuals"]["conjugator"], 1e-12)
        self.assertEqual(max(r["invariant_deltas"]), 0.0)

    def test_upper_vs_diagonal(self):
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
            _, out, _ = run("semisimplify", sample("upper_triangular.json"))
            f.write(out)
        try:
            rep = report("orbit-eq", sample("upper_triangular.json"), f.name)
            self.assertTrue(rep["results"]["equivalent"])
        finally:
            os.unlink(f.name)

    def test_not_equivalent(self):
        rep = report("orbit-eq", sample("generating_pair.json"), sample("eigen_shared.json"), expect=1)
        self.assertFalse(rep["results"]["equivalent"])
        self.assertIsNone(rep["results"]["conjugator"])

    def test_mismatches(self):
        self.assertEqual(run("orbit-eq", sample("generating_pair.json"), sample("scalar_triple.json"))[0], 2)
        self.assertEqual(run("orbit-eq", sample("generating_pair.json"), sample("exact_pair.json"))[0], 2)


class B2(unittest.TestCase):
    def test_roundtrip(self):
        rep = report("b2", "--roundtrip", "--n", "10000")
        self.assertTrue(rep["results"]["pass"])
        self.assertLess(rep["residuals"]["max"], 1e-10)
        self.assertEqual(rep["seed"], 0)
        names = [c["name"] for c in rep["results"]["checks"]]
        self.assertIn("f_inverse_after_f_is_z2_canonical", names)
        self.assertIn("realize_b2_round_trip_exact", names)

    def test_full(self):
        rep = report("b2", "--n", "500", "--seed", "3")
        self.assertTrue(all(c["pass"] for c in rep["results"]["checks"]))
        self.assertIn("quadric_identity_symbolic", [c["name"] for c in rep["results"]["checks"]])


class Verify(unittest.TestCase):
    def test_seed_required(self):
        self.assertEqual(run("verify", "--suite", "b2")[0], 2)

    def test_bad_arguments(self):
        self.assertEqual(run("verify", "--suite", "nope", "--seed", "1")[0], 2)
        self.assertEqual(run("verify", "--suite", "ranks", "--seed", "1", "--r-min", "4", "--r-max", "3")[0], 2)
        self.assertEqual(run("verify", "--suite", "b2", "--seed", "-1")[0], 2)

    def test_ranks(self):
        rep = report("verify", "--suite", "ranks", "--seed", "1", "--r-min", "2", "--r-max", "6", "--samples", "5")
        self.assertTrue(rep["results"]["pass"])
        checks = rep["results"]["suites"][0]["checks"]
        self.assertEqual(len(checks), sum(r + 5 for r in range(2, 7)))

    def test_equivalences_default_scale(self):
        rep = report("verify", "--suite", "equivalences", "--seed", "5", "--samples", "100000")
        self.assertTrue(rep["results"]["pass"])
        for c in rep["results"]["suites"][0]["checks"]:
            self.assertEqual(c["failures"], 0, c["name"])

    def test_all_deterministic(self):
        args = ("verify", "--suite", "all", "--seed", "7", "--samples", "300", "--r-max", "3")
        a = run(*args, "--threads", "1")
        b = run(*args, "--threads", "1")
        c = run(*args, "--threads", "3")
        self.assertEqual(a[0], 0)
        REPORT.validate(json.loads(a[1]))
        self.assertEqual(strip_time(a[1]), strip_time(b[1]))
        self.assertEqual(strip_time(a[1]), strip_time(c[1]))
        self.assertNotEqual(strip_time(a[1]), strip_time(run("verify", "--suite", "all", "--seed", "8", "--samples", "300", "--r-max", "3")[1]))


class Sample(unittest.TestCase):
    def test_gaussian_to_file(self):
        with tempfile.TemporaryDirectory() as d:
            p1, p2 = os.path.join(d, "a.ndjson"), os.path.join(d, "b.ndjson")
            rep = report("sample", "--r", "2", "--n", "1000", "--dist", "gaussian", "--seed", "1", "--out", p1)
            self.assertEqual(rep["results"]["strata"], {"COMMUTING": 0, "EIGEN_SHARED": 0, "GENERATING": 1000})
            report("sample", "--r", "2", "--n", "1000", "--dist", "gaussian", "--seed", "1", "--out", p2)
            with open(p1) as f1, open(p2) as f2:
                lines = f1.read().splitlines()
                self.assertEqual(lines, f2.read().splitlines())
            self.assertEqual(len(lines), 1000)
            for line in lines[:50]:
                self.assertEqual(document(line)["scalar"], "float64")
            code, out, _ = run("check", "-", stdin=lines[0])
            self.assertEqual(json.loads(out)["results"]["stratum"], "GENERATING")

    def test_rational_to_stdout(self):
        code, out, err = run("sample", "--r", "3", "--n", "20", "--dist", "rational", "--seed", "2")
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(len(lines), 20)
        for line in lines:
            self.assertEqual(document(line)["scalar"], "gaussian-rational")
        summary = json.loads(err)
        REPORT.validate(summary)
        self.assertEqual(summary["results"]["backend"], "gaussian-rational")

    def test_thread_invariance(self):
        a = run("sample", "--r", "2", "--n", "5000", "--seed", "4", "--dist", "unit_disc", "--threads", "1")
        b = run("sample", "--r", "2", "--n", "5000", "--seed", "4", "--dist", "unit_disc", "--threads", "4")
        self.assertEqual(a[1], b[1])

    def test_errors(self):
        self.assertEqual(run("sample", "--r", "2", "--n", "10")[0], 2)
        self.assertEqual(run("sample", "--r", "2", "--n", "10", "--seed", "1", "--dist", "cauchy")[0], 2)
        self.assertEqual(run("sample", "--r", "2", "--n", "0", "--seed", "1")[0], 2)
        self.assertEqual(run("sample", "--r", "2", "--n", "10", "--seed", "1", "--out", "/nonexistent/dir/x")[0], 2)


if __name__ == "__main__":
    unittest.main(argv=[sys.argv[0], "-v"])

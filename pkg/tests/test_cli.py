import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import coth
from nullity_lab.cli import RunConfig, UsageError, main, parse_real, render_csv, run

GOLDEN = Path(__file__).parent / "fixtures" / "table_ch_sphere.csv"
TABLE = ["table", "--ambient", "ch", "--family", "geodesic-sphere", "--r-min", "0.5", "--r-max", "1.5", "--steps", "3"]


def run_json(*argv):
    status, text, _ = run(list(argv))
    return status, json.loads(text)


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestTable:
    def test_ch_sphere_values(self):
        status, doc = run_json(*TABLE)
        assert status == 0 and doc["pass"] and doc["schema"] == "nullity-lab/1"
        got = [row["kappa_fitted"] for row in doc["rows"]]
        assert got == pytest.approx([coth(r) ** 2 for r in (0.5, 1.0, 1.5)], abs=1e-10)

    def test_golden_csv(self):
        status, text, _ = run(TABLE + ["--output", "csv"])
        assert status == 0
        got, want = csv_rows(text), csv_rows(GOLDEN.read_text())
        assert list(got[0]) == list(want[0])
        for g, w in zip(got, want, strict=True):
            for key in ("r", "alpha", "lambdas", "kappa_closed_form", "pass"):
                assert g[key] == w[key]
            assert float(g["kappa_fitted"]) == pytest.approx(float(w["kappa_fitted"]), abs=1e-12)

    def test_cp_sphere_quarter_pi(self):
        status, doc = run_json("table", "--ambient", "cp", "--family", "geodesic-sphere", "--r", "pi/4")
        (row,) = doc["rows"]
        assert status == 0
        assert row["kappa_fitted"] == pytest.approx(1.0, abs=1e-12)
        assert row["alpha"] == pytest.approx(0.0, abs=1e-15)

    def test_horosphere_single_row(self):
        status, doc = run_json("table", "--ambient", "ch", "--family", "horosphere")
        assert status == 0 and len(doc["rows"]) == 1
        assert doc["rows"][0]["kappa_closed_form"] == 1.0

    def test_two_curvature_family_rejected(self):
        status, doc = run_json("table", "--ambient", "ch", "--n", "3", "--family", "tube", "--k", "1", "--r", "1")
        assert status == 2 and "error" in doc

    def test_csv_and_json_agree(self):
        _, doc = run_json(*TABLE)
        _, text, _ = run(TABLE + ["--output", "csv"])
        for jrow, crow in zip(doc["rows"], csv_rows(text), strict=True):
            for key, val in jrow.items():
                if isinstance(val, float):
                    assert float(crow[key]) == val


class TestVerify:
    def test_horosphere_pass(self):
        status, doc = run_json("verify", "--ambient", "ch", "--family", "horosphere", "--nullity", "K", "--kappa", "1")
        assert status == 0 and doc["result"]["residual"] <= 1e-12

    def test_horosphere_fail(self):
        status, doc = run_json("verify", "--ambient", "ch", "--family", "horosphere", "--nullity", "K", "--kappa", "0.5")
        assert status == 1 and not doc["pass"]
        assert doc["result"]["residual"] == pytest.approx(0.5, abs=1e-15)

    def test_cp_sphere_kmn(self):
        mu = 2 / math.tan(2 * math.pi / 3)
        status, doc = run_json("verify", "--ambient", "cp", "--family", "geodesic-sphere", "--r", "pi/3",
                               "--nullity", "KMN", "--kappa", "1", "--mu", repr(mu), "--nu", "0")
        assert status == 0

    def test_missing_kappa(self):
        status, doc = run_json("verify", "--ambient", "ch", "--family", "horosphere")
        assert status == 2 and doc["error"]["type"] == "UsageError"

    def test_catalog_error_surfaces(self):
        status, doc = run_json("verify", "--ambient", "cp", "--family", "geodesic-sphere", "--r", "2", "--kappa", "1")
        assert status == 2 and doc["error"]["type"] == "CatalogError"


class TestFitClassify:
    def test_fit_tube(self):
        status, doc = run_json("fit", "--ambient", "ch", "--n", "3", "--family", "tube", "--k", "1", "--r", "0.8", "--nullity", "KM")
        (fit,) = doc["fits"]
        assert status == 0 and fit["solution_dim"] == 0
        assert fit["kappa"] == pytest.approx(-1.0, abs=1e-10)
        assert fit["mu"] == pytest.approx(2 * coth(1.6), abs=1e-10)

    def test_fit_k_on_tube_fails(self):
        status, _ = run_json("fit", "--ambient", "ch", "--n", "3", "--family", "tube", "--k", "1", "--r", "0.8")
        assert status == 1

    @pytest.mark.parametrize("argv", [
        ["--ambient", "cp", "--family", "geodesic-sphere", "--r-min", "0.2", "--r-max", "1.4", "--steps", "5"],
        ["--ambient", "ch", "--n", "3", "--family", "tube", "--k", "1", "--r", "0.9"],
        ["--ambient", "cp", "--n", "4", "--family", "tube", "--k", "2", "--r", "0.7"],
        ["--ambient", "ch", "--family", "horosphere"],
        ["--ambient", "ch", "--n", "3", "--family", "axi-zero", "--lambdas", "0.5,3"],
        ["--c", "-1", "--family", "geodesic-sphere", "--r", "2"],
    ])
    def test_classify_cross_checks_pass(self, argv):
        status, doc = run_json("classify", *argv)
        assert status == 0, doc

    def test_homothety_flag(self):
        _, doc = run_json("classify", "--c", "-1", "--family", "horosphere")
        assert doc["results"][0]["classification"]["kappa"] == pytest.approx(0.25)


class TestNonHopfSearch:
    def test_k_defaults(self):
        status, doc = run_json("nonhopf-search", "--c", "4", "--nullity", "K", "--count", "20000")
        assert status == 0 and doc["search"]["min_residual"] >= 3e-3 - 1e-12
        assert doc["search"]["bound"] == pytest.approx(3e-3)

    def test_kmn(self):
        status, doc = run_json("nonhopf-search", "--c", "-4", "--nullity", "KMN", "--count", "20000")
        assert status == 0
        assert doc["search"]["forcing"]["forced"] == {"kappa": -1.0, "mu": 0.0, "nu": 0.0}

    def test_c_zero_rejected(self):
        status, doc = run_json("nonhopf-search", "--c", "0")
        assert status == 2 and "non-flat" in doc["error"]["message"]

    def test_bad_box(self):
        status, doc = run_json("nonhopf-search", "--c", "4", "--beta-min", "0")
        assert status == 2

    def test_byte_identical(self):
        argv = ["nonhopf-search", "--c", "4", "--nullity", "KM", "--seed", "7", "--count", "5000"]
        assert run(argv)[1] == run(argv)[1]

    def test_tolerance_in_report(self):
        _, doc = run_json("nonhopf-search", "--c", "4", "--count", "10", "--tolerance", "1e-6")
        assert doc["tolerance"] == 1e-6 and doc["config"]["seed"] == 0


class TestPlumbing:
    @pytest.mark.parametrize("text,value", [("pi/4", math.pi / 4), ("2*pi/3", 2 * math.pi / 3),
                                            ("0.5pi", math.pi / 2), ("-pi", -math.pi), ("1e-3", 1e-3)])
    def test_parse_real(self, text, value):
        assert parse_real(text) == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("kw", [dict(tolerance=0), dict(steps=0), dict(c=0.0)])
    def test_config_invariants(self, kw):
        base = dict(command="table", ambient="ch", c=-4.0, n=2)
        with pytest.raises(UsageError):
            RunConfig(**{**base, **kw})

    def test_ambient_mismatch(self):
        status, _ = run_json("classify", "--ambient", "cp", "--c", "-4", "--family", "horosphere")
        assert status == 2

    def test_argparse_usage_exit(self):
        with pytest.raises(SystemExit) as exc:
            run(["bogus"])
        assert exc.value.code == 2

    def test_render_csv_format(self):
        assert render_csv([{"a": 0.1, "b": True, "c": None}]) == "a,b,c\n0.10000000000000001,true,\n"

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert main(["classify", "--ambient", "ch", "--family", "horosphere", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["pass"] is True
        assert capsys.readouterr().out == ""

    def test_subprocess_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "nullity_lab", *TABLE, "--output", "csv"],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert csv_rows(proc.stdout)[0]["kappa_closed_form"] == csv_rows(GOLDEN.read_text())[0]["kappa_closed_form"]

    def test_subprocess_exit_one(self):
        proc = subprocess.run([sys.executable, "-m", "nullity_lab", "verify", "--ambient", "ch",
                               "--family", "horosphere", "--kappa", "0.5"], capture_output=True, text=True)
        assert proc.returncode == 1

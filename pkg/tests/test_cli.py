import csv
import json
import math

import pytest

from swexp.cli import main


def read_rows(path):
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def run(args, tmp_path):
    return main(["--outdir", str(tmp_path)] + args)


class TestExponent:
    def test_gf_single_point(self, tmp_path):
        rc = run(["exponent", "--method", "gf", "--bss", "0.1",
                  "--R", "0.5", "--T", "0", "--out", "e.csv"], tmp_path)
        assert rc == 0
        rows = read_rows(tmp_path / "e.csv")
        assert len(rows) == 1
        assert float(rows[0]["value"]) >= 0.0
        assert rows[0]["diverged"] == "0"

    def test_tce_divergent_inf(self, tmp_path):
        rc = run(["exponent", "--method", "tce-binary", "--bss", "0.1",
                  "--R", "0.5", "--T", "-2.3", "--out", "e.csv"], tmp_path)
        assert rc == 0
        rows = read_rows(tmp_path / "e.csv")
        assert rows[0]["value"] == "inf"
        assert math.isinf(float(rows[0]["value"]))
        assert rows[0]["diverged"] == "1"

    def test_grid_row_count(self, tmp_path):
        rc = run(["exponent", "--method", "gf", "--bss", "0.1",
                  "--R-grid", "0.3:0.6:4", "--T-grid=-0.1:0.1:3",
                  "--out", "e.csv"], tmp_path)
        assert rc == 0
        assert len(read_rows(tmp_path / "e.csv")) == 12

    def test_bits_units_display(self, tmp_path):
        run(["exponent", "--method", "gf", "--bss", "0.1",
             "--R", "0.5", "--T", "0", "--out", "nats.csv"], tmp_path)
        run(["exponent", "--method", "gf", "--bss", "0.1",
             "--R", "0.5", "--T", "0", "--units", "bits", "--out", "bits.csv"], tmp_path)
        v_nats = float(read_rows(tmp_path / "nats.csv")[0]["value"])
        v_bits = float(read_rows(tmp_path / "bits.csv")[0]["value_bits"])
        assert v_bits == pytest.approx(v_nats / math.log(2))

    def test_manifest_written(self, tmp_path):
        run(["exponent", "--method", "gf", "--bss", "0.1",
             "--R", "0.5", "--T", "0", "--out", "e.csv"], tmp_path)
        man = json.loads((tmp_path / "e.csv.manifest.json").read_text())
        assert man["command"] == "exponent"
        assert man["parameters"]["method"] == "gf"
        assert man["library_version"]

    def test_invalid_spec_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({
            "alphabet_x": ["0", "1"], "alphabet_y": ["0", "1"],
            "pmf": [[0.6, 0.2], [0.1, 0.2]],
        }))
        rc = run(["exponent", "--method", "gf", "--source", str(bad),
                  "--R", "0.5", "--T", "0", "--out", "e.csv"], tmp_path)
        assert rc == 2

    def test_grid_flag_conflict(self, tmp_path):
        rc = run(["exponent", "--method", "gf", "--bss", "0.1",
                  "--R", "0.5", "--R-grid", "0:1:3", "--T", "0",
                  "--out", "e.csv"], tmp_path)
        assert rc == 2


class TestPhaseDiagram:
    def test_seven_regions_present(self, tmp_path):
        rc = run(["phase-diagram", "--p", "0.1", "--s-grid", "0:4:41",
                  "--R-grid", "0:0.6931:31", "--out-prefix", "ph"], tmp_path)
        assert rc == 0
        rows = read_rows(tmp_path / "ph_grid.csv")
        assert set(r["region"] for r in rows) == set("ABCDEFG")
        assert (tmp_path / "ph_plot.gp").exists()
        assert (tmp_path / "ph_boundaries.csv").exists()

    def test_degenerate_p_half(self, tmp_path):
        rc = run(["phase-diagram", "--p", "0.5", "--s-grid", "0:3:13",
                  "--R-grid", "0:0.6931:11", "--out-prefix", "ph"], tmp_path)
        assert rc == 0
        rows = read_rows(tmp_path / "ph_grid.csv")
        # boundaries coincide at R = ln 2: only C (s <= 1) and G (s > 1) remain
        assert set(r["region"] for r in rows) <= {"C", "G"}

    def test_continuity_rows(self, tmp_path):
        run(["phase-diagram", "--p", "0.1", "--s-grid", "0:4:17",
             "--R-grid", "0:0.6931:11", "--out-prefix", "ph"], tmp_path)
        rows = read_rows(tmp_path / "ph_continuity.csv")
        assert rows
        assert all(float(r["abs_diff"]) <= 1e-9 for r in rows)


class TestSimulate:
    def test_deterministic_csv(self, tmp_path):
        args = ["simulate", "--bss", "0.1", "--n", "8", "--R", "0.5", "--T", "0",
                "--trials", "20000", "--seed", "7", "--out", "s.csv"]
        assert run(args, tmp_path) == 0
        first = (tmp_path / "s.csv").read_text()
        args[-1] = "s2.csv"
        assert run(args, tmp_path) == 0
        assert (tmp_path / "s2.csv").read_text() == first

    def test_resource_cap_exit_3(self, tmp_path):
        spec = tmp_path / "u4.json"
        spec.write_text(json.dumps({
            "alphabet_x": list("abcd"), "alphabet_y": list("wxyz"),
            "pmf": [[1 / 16.0] * 4] * 4,
        }))
        rc = run(["simulate", "--source", str(spec), "--n", "40", "--R", "0.3",
                  "--T", "0", "--trials", "10", "--seed", "1", "--out", "s.csv"], tmp_path)
        assert rc == 3

    def test_variable_mode(self, tmp_path):
        rc = run(["simulate", "--bss", "0.1", "--n", "6", "--R", "0.5", "--T", "0",
                  "--trials", "5000", "--seed", "3", "--mode", "variable",
                  "--rates", "0.4,0.6", "--out", "s.csv"], tmp_path)
        assert rc == 0
        rows = read_rows(tmp_path / "s.csv")
        assert float(rows[0]["R_actual"]) == pytest.approx(0.5)


class TestCompare:
    def _make_inputs(self, tmp_path):
        run(["simulate", "--bss", "0.1", "--n", "6,8,10,12", "--R", "0.5",
             "--T", "0", "--trials", "50000", "--seed", "7", "--out", "s.csv"], tmp_path)
        run(["exponent", "--method", "gf", "--bss", "0.1", "--R", "0.5",
             "--T", "0", "--out", "e.csv"], tmp_path)

    def test_all_pass_report(self, tmp_path, capsys):
        self._make_inputs(tmp_path)
        rc = run(["compare", "--sim", str(tmp_path / "s.csv"),
                  "--exponent", str(tmp_path / "e.csv"), "--out", "report.txt"], tmp_path)
        out = capsys.readouterr().out
        assert rc == 0
        assert "PASS" in out and "FAIL" not in out
        assert (tmp_path / "report.txt").read_text().startswith("PASS")

    def test_schema_mismatch_names_column(self, tmp_path, capsys):
        self._make_inputs(tmp_path)
        broken = tmp_path / "broken.csv"
        text = (tmp_path / "s.csv").read_text().replace("e1_count", "e1count")
        broken.write_text(text)
        rc = run(["compare", "--sim", str(broken),
                  "--exponent", str(tmp_path / "e.csv")], tmp_path)
        assert rc == 2
        assert "e1_count" in capsys.readouterr().err

import json
import subprocess
import sys

import numpy as np
import pytest

from statdist import binomial_family, make_density
from statdist.cli import main
from statdist.io import ParseError, load, read_continuous, read_density, read_sample, write_density


def _csv(path, rows, header="t,mass"):
    path.write_text(header + "\n" + "".join(f"{t},{m}\n" for t, m in rows))
    return path


@pytest.fixture
def files(tmp_path):
    out = {
        "a": _csv(tmp_path / "a.csv", [(0, 0.5), (1, 0.5)]),
        "b": _csv(tmp_path / "b.csv", [(0, 0.25), (1, 0.75)]),
        "grid4": _csv(tmp_path / "grid4.csv", [(0.125, 0.25), (0.375, 0.25), (0.625, 0.25), (0.875, 0.25)]),
        "bad": _csv(tmp_path / "bad.csv", [(0, 0.5), (1, "x")]),
        "u01": tmp_path / "u01.json",
        "bin": tmp_path / "bin.csv",
        "holes": _csv(tmp_path / "holes.csv", [(0, 0.2), (1, 0.2), (2, 0.0), (3, 0.2), (4, 0.2), (5, 0.2)]),
    }
    out["u01"].write_text(json.dumps({"distribution": "uniform", "low": 0, "high": 1}))
    write_density(binomial_family(5)([0.3]), out["bin"])
    return out


def run(argv, capsys):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestReaders:
    def test_round_trip_is_bit_identical(self, tmp_path):
        rng = np.random.default_rng(0)
        d = make_density(np.sort(rng.uniform(size=7)), rng.dirichlet(np.ones(7)))
        write_density(d, tmp_path / "d.csv")
        back = read_density(tmp_path / "d.csv")
        np.testing.assert_array_equal(back.masses, d.masses)
        np.testing.assert_array_equal(back.support, d.support)

    def test_unsorted_rows_are_sorted(self, tmp_path):
        d = read_density(_csv(tmp_path / "u.csv", [(2, 0.5), (1, 0.5)]))
        np.testing.assert_array_equal(d.support, [1, 2])

    @pytest.mark.parametrize(
        "rows, header, fragment",
        [
            ([(0, 0.5), (1, "x")], "t,mass", "row 3"),
            ([(0, 0.5), (0, 0.5)], "t,mass", "rows 2 and 3"),
            ([(0, -0.5), (1, 1.5)], "t,mass", "row 2"),
            ([(0, 0.5)], "x,y", "header"),
            ([(0, 0.5), (1, 0.6)], "t,mass", "sum"),
        ],
    )
    def test_errors_name_the_problem(self, tmp_path, rows, header, fragment):
        with pytest.raises(ParseError, match=fragment):
            read_density(_csv(tmp_path / "e.csv", rows, header))

    def test_sample_and_load(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("1\n2\n2\n\n3\n")
        assert read_sample(p).n == 4
        np.testing.assert_array_equal(load(p).masses, [0.25, 0.5, 0.25])
        p.write_text("1\nfoo\n")
        with pytest.raises(ParseError, match="line 2"):
            read_sample(p)

    def test_continuous_specs(self, tmp_path):
        p = tmp_path / "n.json"
        p.write_text(json.dumps({"distribution": "norm", "loc": 1, "scale": 2}))
        assert float(read_continuous(p).cdf(1.0)) == pytest.approx(0.5)
        p.write_text(json.dumps({"distribution": "nope"}))
        with pytest.raises(ParseError):
            read_continuous(p)
        p.write_text("{")
        with pytest.raises(ParseError):
            read_continuous(p)


class TestCommands:
    def test_distance(self, files, capsys):
        code, out, _ = run(["distance", "--family", "symmetric-chisq", files["a"], files["b"]], capsys)
        assert code == 0
        report = json.loads(out)
        assert report["value"] == pytest.approx(0.2666667, abs=1e-7)
        assert report["finite"] is True and report["family"] == "symmetric_chisq"

    def test_distance_identical_files(self, files, capsys):
        code, out, _ = run(["distance", files["a"], files["a"]], capsys)
        assert code == 0 and json.loads(out)["value"] == 0

    def test_infinite_serialised_as_string(self, files, tmp_path, capsys):
        c = _csv(tmp_path / "c.csv", [(0, 1.0), (1, 0.0)])
        code, out, _ = run(["distance", "--family", "neyman-chisq", c, files["a"]], capsys)
        report = json.loads(out)
        assert code == 0 and report["value"] == "inf" and report["finite"] is False

    def test_malformed_csv(self, files, capsys):
        code, _, err = run(["distance", files["a"], files["bad"]], capsys)
        assert code == 2 and "row 3" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, _ = run(["ks", tmp_path / "nope.csv", tmp_path / "nope.csv"], capsys)
        assert code == 2

    def test_power_family_flags(self, files, capsys):
        code, out, _ = run(["distance", "--family", "power-divergence", "--lam", "1", files["a"], files["b"]], capsys)
        assert code == 0 and json.loads(out)["value"] == pytest.approx(1 / 6)
        code, _, _ = run(["distance", "--family", "power-divergence", files["a"], files["b"]], capsys)
        assert code == 2

    def test_ks(self, files, capsys):
        code, out, _ = run(["ks", files["u01"], files["grid4"]], capsys)
        assert code == 0 and json.loads(out)["ks"] == pytest.approx(0.125, abs=1e-15)

    def test_residuals(self, files, capsys):
        code, out, _ = run(["residuals", "--kind", "pearson", files["a"], files["b"]], capsys)
        assert code == 0
        np.testing.assert_allclose(json.loads(out)["residual"], [1.0, -1 / 3])
        code, out, _ = run(["residuals", "--kind", "pearson", "--format", "csv", files["a"], files["b"]], capsys)
        assert out.splitlines()[0] == "t,residual"

    def test_fit(self, files, capsys):
        code, out, _ = run(["fit", files["bin"], "--family", "symmetric-chisq", "--model", "binomial", "--trials", "5"],
                           capsys)
        assert code == 0
        assert json.loads(out)["theta_hat"][0] == pytest.approx(0.3, abs=1e-6)

    def test_fit_neyman_empty_cell(self, files, capsys):
        argv = ["fit", files["holes"], "--family", "neyman", "--bounds", "0.01", "0.99"]
        code, _, err = run(argv, capsys)
        assert code == 3 and "blended" in err
        code, out, _ = run(argv + ["--fallback-blend"], capsys)
        assert code == 0 and json.loads(out)["fallback_used"] is True

    def test_sweep(self, capsys):
        code, out, _ = run(["sweep", "--epsilons", "0", "0.05", "--format", "csv"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "spec,epsilon,theta_hat,shift,converged"
        zero_rows = [line for line in lines[1:] if line.split(",")[1] == "0.0"]
        assert len(zero_rows) == 3 and all(line.split(",")[3] == "0.0" for line in zero_rows)

    def test_smooth_distance(self, files, capsys):
        code, out, _ = run(["smooth-distance", files["a"], files["b"], "--bandwidth", "1"], capsys)
        assert code == 0 and json.loads(out)["value"] > 0
        code, _, _ = run(["smooth-distance", files["a"], files["b"], "--measure", "bwhd"], capsys)
        assert code == 2

    def test_dump_inputs_round_trip(self, files, tmp_path, capsys):
        dump = tmp_path / "dump"
        code, _, _ = run(["distance", files["a"], files["b"], "--dump-inputs", dump], capsys)
        assert code == 0
        np.testing.assert_array_equal(read_density(dump / "second.csv").masses, read_density(files["b"]).masses)

    def test_deterministic_output_file(self, files, tmp_path, capsys):
        outs = []
        for name in ("r1.json", "r2.json"):
            run(["fit", files["bin"], "--output", tmp_path / name, "--seed", "4"], capsys)
            outs.append((tmp_path / name).read_bytes())
        assert outs[0] == outs[1]

    def test_selftest_over_tight_tolerance_fails(self, capsys):
        code, out, _ = run(["selftest", "--tol", "1e-20"], capsys)
        assert code == 1 and "FAIL" in out


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "statdist", "ks", str(files["u01"]), str(files["grid4"])],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["ks"] == pytest.approx(0.125)

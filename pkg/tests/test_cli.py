"""Tests for the command-line interface: pinned output lines, exit
codes (0 contracts pass / 1 contract violated / 2 usage or config
error), file artifacts, and byte-identical re-runs through the CLI
path.  Everything runs in-process through main(argv); one subprocess
test covers the python -m wiring.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from semistab import (
    AtomicMeasure,
    discretize,
    evolve_norms,
    gaussian_well,
    lacunary_measure,
    load_measure,
    monomial_profile_measure,
    orbit_to_csv,
    save_measure,
    save_potential,
    spectrum_to_csv,
)
from semistab.cli import main


@pytest.fixture()
def two_atom_file(tmp_path):
    path = tmp_path / "two-atom.measure"
    save_measure(AtomicMeasure.from_points([-1.0, -2.0], [0.5, 0.5]), path)
    return str(path)


@pytest.fixture()
def profile_file(tmp_path):
    path = tmp_path / "profile-075.measure"
    save_measure(monomial_profile_measure(0.75), path)
    return str(path)


def write_bounds_config(path, bound_scale=None, output_dir=None):
    lines = ["[study]", "kind = section3-bounds", "seed = 7"]
    if output_dir is not None:
        lines.append(f"output_dir = {output_dir}")
    lines += ["", "[bounds]", "n_measures = 6", "n_atoms = 8", "n_shifted = 3", "n_t = 80"]
    if bound_scale is not None:
        lines += ["", "[hooks]", f"bound_scale = {bound_scale}"]
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return str(path)


class TestClassify:
    def test_two_atom_measure_prints_unit_gap_verdict(self, two_atom_file, capsys):
        rc = main(["classify", two_atom_file])
        out = capsys.readouterr().out
        assert rc == 0
        assert "ExponentiallyStable gap=1 rate=1" in out
        assert out.count("\n") == 1

    def test_lacunary_measure_is_stable_not_exponential(self, tmp_path, capsys):
        path = tmp_path / "lacunary.measure"
        save_measure(lacunary_measure(0.5, (0.5, 4.0), 12), path)
        rc = main(["classify", str(path)])
        out = capsys.readouterr().out
        assert rc == 0
        assert out.startswith("StableNotExponential ")
        assert "rate=" not in out

    def test_gap_tol_flag_changes_the_call(self, two_atom_file, capsys):
        rc = main(["classify", two_atom_file, "--gap-tol", "2.0"])
        out = capsys.readouterr().out
        assert rc == 0
        assert out.startswith("StableNotExponential ")
        assert "gap_tol=2" in out


class TestMeasureExponents:
    def test_profile_exponents_near_closed_form(self, profile_file, capsys):
        rc = main(["measure", "exponents", profile_file, "--window", "1e-6,0.1"])
        out = capsys.readouterr().out.splitlines()
        assert rc == 0
        assert out[0] == "d_minus,d_plus,n_scales,log_eps_min,log_eps_max"
        d_minus, d_plus = (float(tok) for tok in out[1].split(",")[:2])
        assert abs(d_minus - 2.5) <= 1e-3
        assert abs(d_plus - 2.5) <= 1e-3

    def test_power_tokens_reach_log_domain_scales(self, tmp_path, capsys):
        path = tmp_path / "lacunary.measure"
        save_measure(lacunary_measure(0.5, (0.5, 4.0), 12), path)
        rc = main(
            ["measure", "exponents", str(path), "--window", "2^-2048,2^-1", "--scales", "240"]
        )
        out = capsys.readouterr().out.splitlines()
        assert rc == 0
        d_minus, d_plus = (float(tok) for tok in out[1].split(",")[:2])
        assert d_minus <= 0.7
        assert d_plus >= 3.0

    def test_malformed_window_is_a_usage_error(self, profile_file, capsys):
        rc = main(["measure", "exponents", profile_file, "--window", "0.1"])
        captured = capsys.readouterr()
        assert rc == 2
        assert "error" in captured.err
        assert captured.out == ""


class TestEvolve:
    def test_writes_the_orbit_trace_csv(self, two_atom_file, tmp_path, capsys):
        out_csv = str(tmp_path / "orbit.csv")
        rc = main(
            ["evolve", two_atom_file, "--tmin", "0.1", "--tmax", "100", "--nt", "50",
             "--out", out_csv]
        )
        stdout = capsys.readouterr().out.splitlines()
        assert rc == 0
        assert stdout[0] == "orbit_csv,n_t,t_min,t_max"
        assert stdout[1].split(",")[1] == "50"
        mu = load_measure(two_atom_file)
        expected = tmp_path / "expected.csv"
        orbit_to_csv(evolve_norms(mu, 0.1, 100.0, 50), expected)
        assert open(out_csv, "rb").read() == open(expected, "rb").read()

    def test_default_output_honors_environment_dir(self, two_atom_file, tmp_path,
                                                   monkeypatch, capsys):
        monkeypatch.setenv("SEMISTAB_OUTDIR", str(tmp_path / "envdir"))
        rc = main(["evolve", two_atom_file, "--tmin", "0.1", "--tmax", "10", "--nt", "5"])
        capsys.readouterr()
        assert rc == 0
        assert (tmp_path / "envdir" / "orbit.csv").exists()

    def test_bad_grid_is_a_usage_error(self, two_atom_file, capsys):
        rc = main(["evolve", two_atom_file, "--tmin", "10", "--tmax", "1", "--nt", "5"])
        assert rc == 2
        assert "error" in capsys.readouterr().err


class TestOperatorSpectrum:
    def test_writes_the_spectrum_csv(self, tmp_path, capsys):
        pot = tmp_path / "well.potential"
        save_potential(gaussian_well(depth=1.0, width=1.0, nu=1, a_bound=1.0), pot)
        out_csv = str(tmp_path / "spec.csv")
        rc = main(["operator", "spectrum", str(pot), "--L", "8", "--h", "0.1",
                   "--out", out_csv])
        stdout = capsys.readouterr().out.splitlines()
        assert rc == 0
        assert stdout[0] == "spectrum_csv,n_eigenvalues,lambda_max"
        assert stdout[1].split(",")[1] == "159"
        H = discretize(gaussian_well(depth=1.0, width=1.0, nu=1, a_bound=1.0), 8.0, 0.1)
        expected = tmp_path / "expected.csv"
        spectrum_to_csv(H, expected)
        assert open(out_csv, "rb").read() == open(expected, "rb").read()

    def test_resource_cap_is_a_config_error(self, tmp_path, capsys):
        pot = tmp_path / "well.potential"
        save_potential(gaussian_well(depth=1.0, width=1.0, nu=2, a_bound=1.0), pot)
        rc = main(["operator", "spectrum", str(pot), "--L", "16", "--h", "0.05"])
        assert rc == 2
        assert "error" in capsys.readouterr().err


class TestStudy:
    def test_bounds_study_passes_with_exit_zero(self, tmp_path, capsys):
        cfg = write_bounds_config(tmp_path / "section3-bounds.cfg")
        out_dir = str(tmp_path / "report")
        rc = main(["study", cfg, "--out", out_dir])
        captured = capsys.readouterr()
        assert rc == 0
        assert "overall: PASS" in captured.out
        assert captured.out.count("PASS ") >= 3
        assert "report written to" in captured.err
        assert os.path.exists(os.path.join(out_dir, "section3-bounds.csv"))
        assert os.path.exists(os.path.join(out_dir, "summary.txt"))

    def test_tightened_bound_hook_fails_with_exit_one(self, tmp_path, capsys):
        cfg = write_bounds_config(tmp_path / "section3-bounds.cfg", bound_scale=0.9)
        rc = main(["study", cfg, "--out", str(tmp_path / "report")])
        captured = capsys.readouterr()
        assert rc == 1
        assert "overall: FAIL" in captured.out

    def test_jobs_flag_keeps_artifacts_byte_identical(self, tmp_path, capsys):
        cfg = write_bounds_config(tmp_path / "section3-bounds.cfg")
        rc1 = main(["study", cfg, "--out", str(tmp_path / "serial"), "--jobs", "1"])
        rc2 = main(["study", cfg, "--out", str(tmp_path / "threaded"), "--jobs", "4"])
        capsys.readouterr()
        assert rc1 == rc2 == 0
        for name in ("section3-bounds.csv", "equality-witness.csv", "config.echo.ini"):
            serial = open(tmp_path / "serial" / name, "rb").read()
            threaded = open(tmp_path / "threaded" / name, "rb").read()
            assert serial == threaded

    def test_gdelta_study_emits_the_witness_measure(self, tmp_path, capsys):
        cfg = tmp_path / "witness.cfg"
        cfg.write_text("[study]\nkind = gdelta-witness\nseed = 1\n", encoding="ascii")
        out_dir = tmp_path / "report"
        rc = main(["study", str(cfg), "--out", str(out_dir)])
        captured = capsys.readouterr()
        assert rc == 0
        assert "witness: oscillation witness established" in captured.out
        mu = load_measure(out_dir / "witness.measure")
        assert mu.n_atoms == 12

    def test_output_dir_falls_back_to_environment(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SEMISTAB_OUTDIR", str(tmp_path / "envreport"))
        monkeypatch.chdir(tmp_path)
        cfg = write_bounds_config(tmp_path / "section3-bounds.cfg")
        rc = main(["study", cfg])
        capsys.readouterr()
        assert rc == 0
        assert (tmp_path / "envreport" / "summary.txt").exists()

    def test_unknown_study_kind_is_a_config_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("[study]\nkind = frobnicate\n", encoding="ascii")
        rc = main(["study", str(cfg)])
        assert rc == 2
        assert "error" in capsys.readouterr().err


class TestUsageErrors:
    def test_unknown_flag_prints_usage_on_stderr(self, two_atom_file, capsys):
        rc = main(["classify", two_atom_file, "--frobnicate"])
        captured = capsys.readouterr()
        assert rc == 2
        assert "usage:" in captured.err
        assert captured.out == ""

    def test_unknown_subcommand(self, capsys):
        rc = main(["transmogrify"])
        captured = capsys.readouterr()
        assert rc == 2
        assert "usage:" in captured.err

    def test_no_arguments(self, capsys):
        rc = main([])
        captured = capsys.readouterr()
        assert rc == 2
        assert "usage:" in captured.err

    def test_missing_file_is_a_usage_error(self, capsys):
        rc = main(["classify", "/nonexistent/nowhere.measure"])
        captured = capsys.readouterr()
        assert rc == 2
        assert "error" in captured.err

    def test_help_exits_zero(self, capsys):
        rc = main(["--help"])
        captured = capsys.readouterr()
        assert rc == 0
        assert "usage:" in captured.out


class TestModuleEntryPoint:
    def test_python_dash_m_classify(self, two_atom_file):
        proc = subprocess.run(
            [sys.executable, "-m", "semistab", "classify", two_atom_file],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "ExponentiallyStable gap=1 rate=1" in proc.stdout

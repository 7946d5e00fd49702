import subprocess
import sys

import numpy as np
import pytest

from brierlab import cli, io, model, probing
from brierlab.model import InformationScope as S

CANONICAL = """\
prior = 0.1
mean_neg = 0, 0
mean_pos = 1, 2
cov = 1, 0.7, 0.7, 1
seed = 5
n = 20000
"""

INDEPENDENT = """\
prior = 0.1
mean_neg = 0, 0
mean_pos = 2, 1
cov = 1, 0, 0, 1
seed = 5
n = 20000
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "canonical.cfg"
    path.write_text(CANONICAL)
    return str(path)


def run(*argv):
    return cli.main([str(a) for a in argv])


class TestSimulate:
    def test_byte_identical_across_runs_and_threads(self, tmp_path, config, monkeypatch):
        monkeypatch.setenv("BRIERLAB_THREADS", "1")
        assert run("simulate", "--config", config, "--out", tmp_path / "a") == 0
        monkeypatch.setenv("BRIERLAB_THREADS", "4")
        assert run("simulate", "--config", config, "--out", tmp_path / "b") == 0
        assert (tmp_path / "a/sample.csv").read_bytes() == (tmp_path / "b/sample.csv").read_bytes()

    def test_flags_override_config(self, tmp_path, config):
        assert run("simulate", "--config", config, "--n", 7, "--out", tmp_path) == 0
        assert io.read_sample_csv(tmp_path / "sample.csv").n == 7

    def test_zero_size_is_a_validation_error(self, tmp_path, config, capsys):
        assert run("simulate", "--config", config, "--n", 0, "--out", tmp_path) == 1
        assert "n must be at least 1" in capsys.readouterr().err

    def test_unwritable_output_is_an_io_error(self, tmp_path, config):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert run("simulate", "--config", config, "--out", blocker / "sub") == 2

    def test_invalid_model_and_usage(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("prior = 1.5\n")
        assert run("simulate", "--config", bad, "--out", tmp_path) == 1
        with pytest.raises(SystemExit) as info:
            run("simulate", "--n", "lots")
        assert info.value.code == 1

    def test_missing_config_file(self, tmp_path):
        assert run("simulate", "--config", tmp_path / "nope.cfg") == 2


class TestCurves:
    def test_correlated_layout(self, tmp_path, config, capsys):
        assert run("curves", "--config", config, "--out", tmp_path, "--grid", 201) == 0
        for scope in ("full", "nb", "c1", "nbcal"):
            assert (tmp_path / f"curve_{scope}.csv").exists()
        assert (tmp_path / "curves.svg").read_text().count("<polyline") == 4
        assert "VIOLATED" not in capsys.readouterr().out

    def test_independence_layout_runs_harness(self, tmp_path):
        cfg = tmp_path / "ind.cfg"
        cfg.write_text(INDEPENDENT)
        assert run("curves", "--config", cfg, "--out", tmp_path) == 0
        assert "certified                : True" in (tmp_path / "harness.txt").read_text()

    def test_prior_scope_is_the_tent(self, tmp_path, config):
        assert run("curves", "--config", config, "--out", tmp_path, "--scopes", "prior") == 0
        table = np.loadtxt(tmp_path / "curve_prior.csv", delimiter=",", skiprows=1)
        t = table[:, 0]
        np.testing.assert_allclose(table[:, 1], np.minimum(0.9 * t, 0.1 * (1 - t)), atol=1e-15)

    def test_grid_validated(self, tmp_path, config):
        assert run("curves", "--config", config, "--out", tmp_path, "--grid", 2) == 1


class TestDecompose:
    def test_from_config(self, tmp_path, config):
        assert run("decompose", "--config", config, "--out", tmp_path) == 0
        lines = (tmp_path / "decomposition_c1.csv").read_text().splitlines()
        assert lines[0] == "refinement,grouping,groupwise_calibration,total"
        parts = [float(v) for v in lines[1].split(",")]
        assert abs(sum(parts[:3]) - parts[3]) < 1e-2

    def test_from_predictions(self, tmp_path, canonical):
        smp = model.sample(canonical, 5000, seed=1)
        path = tmp_path / "p.csv"
        rows = np.column_stack([smp.psi(S.NAIVE_BAYES), smp.labels, smp.psi(S.FULL)])
        np.savetxt(path, rows, delimiter=",", header="z,label,psi", comments="", fmt="%.17g")
        assert run("decompose", "--predictions", path, "--out", tmp_path) == 0
        assert (tmp_path / "decomposition.csv").exists()

    def test_malformed_predictions(self, tmp_path, capsys):
        path = tmp_path / "p.csv"
        path.write_text("z,label,psi\n0.1,0,0.2\n0.3,1\n")
        assert run("decompose", "--predictions", path, "--out", tmp_path) == 1
        assert "line 3" in capsys.readouterr().err

    def test_psi_column_required(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("z,label\n0.1,0\n0.3,1\n")
        assert run("decompose", "--predictions", path, "--out", tmp_path) == 1


class TestProbe:
    def test_threshold_families(self, tmp_path, config):
        assert run("probe", "--config", config, "--out", tmp_path) == 0
        head, row = (tmp_path / "probe_c1.csv").read_text().splitlines()
        assert head == "lhs,combined_regret,rhs"
        lhs, combined, rhs = map(float, row.split(","))
        assert lhs == pytest.approx(combined, abs=1e-12) and lhs <= rhs + 1e-12

    def test_family_csv(self, tmp_path, config, rng):
        assert run("simulate", "--config", config, "--n", 40, "--out", tmp_path) == 0
        fam = probing.ClassifierFamily(probing.default_grid(9), rng.random((40, 9)) < 0.3)
        io.write_family_csv(tmp_path / "fam.csv", fam)
        assert run("probe", "--family", tmp_path / "fam.csv", "--sample",
                   tmp_path / "sample.csv", "--out", tmp_path) == 0
        assert (tmp_path / "probe.csv").exists()

    def test_family_size_mismatch(self, tmp_path, config):
        fam = probing.ClassifierFamily(probing.default_grid(3), np.ones((5, 3), bool))
        io.write_family_csv(tmp_path / "fam.csv", fam)
        assert run("probe", "--config", config, "--family", tmp_path / "fam.csv",
                   "--out", tmp_path) == 1


class TestVerify:
    def test_passes_on_canonical(self, config, capsys):
        assert run("verify", "--config", config, "--n", 100_000) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and "checks passed" in out

    def test_corrupted_posterior_fails_additivity(self, tmp_path, config, capsys):
        smp = model.sample(model.canonical_model(), 50_000, seed=5)
        smp.posteriors[S.FULL][:] = np.random.default_rng(0).random(smp.n)
        io.write_sample_csv(tmp_path / "bad.csv", smp)
        assert run("verify", "--config", config, "--sample", tmp_path / "bad.csv") == 3
        out = capsys.readouterr().out
        assert any("decompose.additivity" in line and "FAIL" in line
                   for line in out.splitlines())

    def test_zero_tolerance_fails(self, config, capsys):
        assert run("verify", "--config", config, "--tolerance", 0) == 3
        assert "sample.label_mean" in capsys.readouterr().out


def test_report(tmp_path, config):
    assert run("report", "--config", config, "--out", tmp_path, "--grid", 201) == 0
    text = (tmp_path / "report.txt").read_text()
    assert "verify     ok" in text
    for name in ("sample.csv", "curves.svg", "decomposition_full.csv", "probe_full.csv"):
        assert (tmp_path / name).exists()


def test_module_entry_point(tmp_path, config):
    proc = subprocess.run([sys.executable, "-m", "brierlab", "simulate", "--config", config,
                           "--n", "10", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "sample.csv").exists()

import numpy as np
import pytest

from brierlab import curves, io, metrics, model, probing
from brierlab.model import InformationScope as S


class TestSampleCsv:
    def test_round_trip_is_lossless(self, tmp_path, canonical):
        smp = model.sample(canonical, 500, seed=2)
        path = tmp_path / "s.csv"
        io.write_sample_csv(path, smp)
        back = io.read_sample_csv(path)
        np.testing.assert_array_equal(back.features, smp.features)
        np.testing.assert_array_equal(back.labels, smp.labels)
        for scope in S:
            np.testing.assert_array_equal(back.psi(scope), smp.psi(scope))

    def test_header_and_line_endings(self, tmp_path, canonical):
        path = tmp_path / "s.csv"
        io.write_sample_csv(path, model.sample(canonical, 3, seed=2))
        raw = path.read_bytes()
        assert raw.startswith(b"x1,x2,label,psi_full,psi_c1,psi_c2,psi_nb,psi_nbcal,psi_prior\n")
        assert b"\r" not in raw and raw.count(b"\n") == 4

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(io.InputError):
            io.read_sample_csv(path)


class TestPredictionsCsv:
    def test_full_header(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("z,label,psi,group_score\n0.1,0,0.2,3\n0.8,1,0.7,5\n")
        preds = io.read_predictions_csv(path)
        np.testing.assert_array_equal(preds.z, [0.1, 0.8])
        np.testing.assert_array_equal(preds.group_score, [3, 5])

    def test_optional_columns(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("z,label\n0.1,0\n")
        preds = io.read_predictions_csv(path)
        assert preds.oracle_psi is None and preds.group_score is None

    @pytest.mark.parametrize("body,line", [
        ("z,label\n0.1,0\n0.2\n", 3),
        ("z,label\n0.1,0\n1.5,1\n", 3),
        ("z,label\n0.1,0\n0.2,0\n0.3,7\n", 4),
        ("z,label,psi\n0.1,0,abc\n", 2),
        ("y,label\n0.1,0\n", 1),
    ])
    def test_errors_name_the_line(self, tmp_path, body, line):
        path = tmp_path / "p.csv"
        path.write_text(body)
        with pytest.raises(io.InputError, match=f"line {line}:"):
            io.read_predictions_csv(path)


class TestOtherFormats:
    def test_curve_csv_round_trip(self, tmp_path, canonical):
        c = curves.exact_curve(canonical, S.FULL, curves.uniform_grid(11))
        io.write_curve_csv(tmp_path / "c.csv", c)
        assert (tmp_path / "c.csv").read_text().splitlines()[0] == "t,value"
        back = io.read_curve_csv(tmp_path / "c.csv", canonical.prior)
        np.testing.assert_array_equal(back.values, c.values)

    def test_decomposition_csv(self, tmp_path):
        d = metrics.BrierDecomposition(0.05, 0.01, 0.002, 0.062)
        io.write_decomposition_csv(tmp_path / "d.csv", d)
        lines = (tmp_path / "d.csv").read_text().splitlines()
        assert lines[0] == "refinement,grouping,groupwise_calibration,total"
        assert [float(v) for v in lines[1].split(",")] == [0.05, 0.01, 0.002, 0.062]

    def test_seventeen_digits(self):
        assert io.fmt(0.1) == "0.10000000000000001"
        assert float(io.fmt(np.pi)) == np.pi

    def test_family_round_trip(self, tmp_path, rng):
        fam = probing.ClassifierFamily(probing.default_grid(5), rng.random((4, 5)) < 0.5)
        io.write_family_csv(tmp_path / "f.csv", fam)
        back = io.read_family_csv(tmp_path / "f.csv")
        np.testing.assert_array_equal(back.decisions, fam.decisions)
        np.testing.assert_allclose(back.grid, fam.grid, rtol=0, atol=0)

    def test_incomplete_family_rejected(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("instance_id,t,decision\n0,0.25,1\n0,0.75,0\n1,0.25,1\n")
        with pytest.raises(io.InputError):
            io.read_family_csv(path)

    def test_svg_structure(self, canonical):
        g = curves.uniform_grid(21)
        series = [(name, curves.exact_curve(canonical, s, g), style)
                  for name, s, style in [("a", S.FULL, "solid"), ("b", S.NAIVE_BAYES, "dashed"),
                                         ("c", S.COMPONENT1, "dashdot"),
                                         ("d", S.PRIOR, "dotted")]]
        svg = io.curves_svg(series, "title")
        assert 'viewBox="0 0 800 600"' in svg
        assert svg.count("<polyline") == 4
        for dash in ("10 6", "10 5 2 5", "2 5"):
            assert f'stroke-dasharray="{dash}"' in svg


class TestConfig:
    def test_parse(self):
        cfg = io.parse_config("""
            # canonical
            prior = 0.2
            mean_neg = 0, 0
            mean_pos = 1 2
            cov = 1, 0.5, 0.5, 1
            seed = 9
            n = 100
            scopes = full,c1
        """)
        assert cfg["prior"] == 0.2 and cfg["mean_pos"] == (1.0, 2.0)
        assert cfg["cov"] == (1.0, 0.5, 0.5, 1.0)
        assert cfg["scopes"] == [S.FULL, S.COMPONENT1]
        assert cfg["n"] == 100

    @pytest.mark.parametrize("text", ["prior 0.1", "colour = red", "cov = 1,0,1",
                                      "n = many", "prior = nan", "scopes = c9"])
    def test_rejects(self, text):
        with pytest.raises(io.InputError):
            io.parse_config(text)

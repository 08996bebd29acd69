import json
import math

import pytest

import corner_unfold as cu


def test_saddle_of_the_case_study():
    f = cu.Map(cu.NormalFormParams())
    s = f.saddle()
    assert s.point == pytest.approx((-4.0, 3.0), abs=1e-12)
    assert s.stable == pytest.approx(0.5)
    assert s.unstable == pytest.approx(1.5)
    assert f((0.0, 5.0)) == (6.0, 0.0)
    assert f.label((1.0, 0.0)) == "R"


def test_orbit_and_escape():
    pts, escaped = cu.Map(cu.NormalFormParams()).iterate((0.0, 0.0), 100)
    assert len(pts) == 101 and not escaped
    _, escaped = cu.Map(cu.NormalFormParams(delta_R=1.45)).iterate((0.0, 0.0), 100000)
    assert escaped


def test_corner_and_ratios():
    corner = cu.locate_corner(cu.NormalFormParams(), 1.25, 1.45)
    assert corner == pytest.approx(1.35, abs=1e-3)
    values, ratios, slope = cu.bcb_sequence(cu.NormalFormParams(), corner, 8, 12)
    assert all(v < corner for v in values)
    assert [n for n, _ in ratios] == [8, 9, 10, 11]
    assert ratios[-1][1] == pytest.approx(1.5, rel=0.1)
    assert slope < 0


def test_periodic_orbit():
    f = cu.Map(cu.NormalFormParams(delta_R=1.45))
    o = f.periodic_orbit("LLLLLLLR")
    assert len(o["points"]) == 8
    assert o["admissible"]
    assert o["spectral_radius"] > 1


def test_certificate_and_oracle():
    c = cu.transversality_certificate((-4.0, 0.4, 4.0, 0.4), -1.0)
    assert c["crossing"]
    assert c["z_minus1"][0] == pytest.approx(0.0, abs=1e-12)
    numeric, exact = cu.synthetic_bcb(0.5, 1.5, 5)
    assert exact == pytest.approx(1.5**-5 - 0.5**5)
    assert abs(numeric - exact) < 1e-12


def test_words_and_cells():
    assert cu.rotational_word(6, 1, 8) == "LLLLLLRR"
    period, radius = cu.classify_cell(cu.NormalFormParams(tau_R=-0.4, delta_R=1.0), 12)
    assert period == 0 or radius < 1


def test_config_and_run(tmp_path):
    with pytest.raises(cu.ConfigError):
        cu.normalise_config('{"iterate": {"nope": 1}}')
    text = cu.normalise_config('{"tent": {"iterations": 4}}')
    assert json.loads(text)["tent"]["iterations"] == 4
    code, summary = cu.run("tent", text, str(tmp_path))
    assert code == 0
    assert (tmp_path / "tent.csv").read_text().startswith("i,x\n")
    with pytest.raises(cu.NumericError):
        cu.locate_corner(cu.NormalFormParams(), 1.40, 1.45)
    assert "fixed_points" in json.loads(summary)
    assert math.isfinite(json.loads(summary)["final"])

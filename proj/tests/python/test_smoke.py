import math

import numpy as np
import pytest

import berrywave as bw


def test_bessel_matches_known_values():
    assert bw.bessel_j(0, 0.0) == 1.0
    assert bw.bessel_j(1, 2.0) == pytest.approx(0.5767248077568734, abs=1e-14)
    u = np.linspace(0.0, 50.0, 11)
    assert bw.bessel_j(2, u).shape == u.shape


def test_hermite_and_coefficients():
    assert list(bw.hermite(4, np.array([0.0, 1.0, 2.0]))) == [3.0, -2.0, -5.0]
    assert bw.alpha_coeff(0, 0) == pytest.approx(math.sqrt(2 * math.pi) / 2)
    assert bw.zeta_coeff(1, 1, 1, 1) == -0.375
    assert bw.a_rate(1, 1) == 9.0


def test_kernels_are_antisymmetric_in_mixed_entries():
    k = bw.normalized_kernels(3.0, 0.1, -0.2)
    assert k.shape == (3, 3)
    assert k[1, 0] == pytest.approx(-k[0, 1])


def test_wave_and_nodal_length():
    w = bw.Wave(100.0, seed=3)
    d = bw.Domain("rectangle 0 0 1 1")
    assert d.area == 1.0
    values, x0, y0, h = w.grid(d)
    assert values.shape[0] == values.shape[1]
    assert values[0, 0] == pytest.approx(w(x0, y0), abs=1e-10)
    length = w.nodal_length(d)
    assert length == pytest.approx(bw.nodal_length(values, x0, y0, h, d), rel=1e-2)
    assert 15.0 < length < 30.0


def test_analytic_zero_set():
    x = np.linspace(0.0, 1.0, 257)
    values = np.cos(2 * np.pi * x)[None, :].repeat(257, axis=0)
    d = bw.Domain.rectangle(0, 0, 1, 1)
    assert bw.nodal_length(values, 0.0, 0.0, 1 / 256, d) == pytest.approx(2.0, abs=1e-3)
    re = np.sin(2 * np.pi * x)[None, :].repeat(257, axis=0)
    im = re.T.copy()
    assert bw.vortex_count(re, im, 0.0, 0.0, 1 / 256, bw.Domain.rectangle(0.25, 0.25, 0.5, 0.5)) == 1


def test_predictions_and_rates():
    p = bw.predictions(100.0, [bw.Domain.rectangle(0, 0, 1, 1), bw.Domain.rectangle(0.5, 0, 1, 1)])
    assert p["mean_length"][0] == pytest.approx(math.pi * 10 / math.sqrt(2))
    assert p["C"][0][1] == pytest.approx(0.5)
    d = bw.Domain.rectangle(0, 0, 1, 1)
    r = bw.covariance_rate_check("a1,a1", 1e4, d, d)
    assert r["pair"] == "a1,a1" and r["ratio"] > 1.0


def test_run_experiment_and_errors():
    cfg = "experiment = clt\nenergies = 50\ndomain = rectangle 0 0 1 1\nreplicates = 4\nseed = 9\n"
    summary, csv = bw.run(cfg)
    assert summary["config_hash"] == bw.config_hash(cfg)
    assert csv.splitlines()[0] == "replicate,seed,E,domain_id,stat,value"
    assert len(csv.splitlines()) == 1 + 4 * 3
    again, _ = bw.run(cfg, jobs=2)
    assert again == summary
    with pytest.raises(bw.ConfigError):
        bw.run(cfg + "mystery = 1\n")
    with pytest.raises(ValueError):
        bw.Domain("hexagon 1 2")

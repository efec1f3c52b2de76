import itertools
import math

import numpy as np
import pytest

from pflion.fitting import (DataSeries, fit_focus_hyperbola, fit_scalloped, fwhm_of_series,
                            hyperbola, least_squares, scalloped_model)

G = 2 * math.pi * 19.6
OM = 2 * math.pi * 20.0
TRUTH_FOCUS = np.array([3.7, 9.7, 0.0])
TRUTH_SCALLOP = [7.6, 0.5, 0.0, 1000.0, 50.0]


def focus_data(n=21, span=30.0, z0=0.0):
    z = np.linspace(-span, span, n)
    return DataSeries(z, hyperbola(z, [3.7, 9.7, z0]))


def scallop_x():
    return np.linspace(-250, 250, 201) * 2 * math.pi


def test_linear_exact():
    x = np.arange(1.0, 11.0)
    r = least_squares("linear", DataSeries(x, 2 * x), [1.0])
    assert r.converged and r.parameters[0] == pytest.approx(2.0, abs=1e-10)
    assert r.residual_norm >= 0 and np.all(r.parameter_sigmas >= 0)


def test_hyperbola_from_5_5():
    d = focus_data()
    r = least_squares(lambda x, p: hyperbola(x, [p[0], p[1], 0.0]), d, [5.0, 5.0])
    assert r.converged
    np.testing.assert_allclose(r.parameters, [3.7, 9.7], rtol=1e-6)
    r = least_squares("hyperbola", d, [5.0, 5.0, 0.0])
    np.testing.assert_allclose(r.parameters[:2], [3.7, 9.7], rtol=1e-6)


def test_zero_data_flagged():
    z = np.linspace(-30, 30, 21)
    r = least_squares("hyperbola", DataSeries(z, 0 * z), [5.0, 5.0, 0.0])
    assert not r.converged and "singular" in r.message


def test_validation():
    with pytest.raises(ValueError):
        DataSeries([1, 2], [1])
    with pytest.raises(ValueError):
        DataSeries([1, 2], [1, 2], [1, 0])
    with pytest.raises(ValueError):
        least_squares("hyperbola", DataSeries([1, 2, 3], [1, 2, 3]), [1, 1, 0])
    with pytest.raises(ValueError):
        least_squares("linear", DataSeries([1, 2], [1, 2]), [float("nan")])


def test_focus_roundtrip():
    r = fit_focus_hyperbola(focus_data())
    dof = r.extras["depth_of_focus"][0]
    assert r.converged
    assert dof == pytest.approx(19.4, rel=1e-4)
    assert r.parameters[0] == pytest.approx(3.7, rel=1e-4)


def test_focus_monte_carlo():
    rng = np.random.default_rng(20160)
    z = np.linspace(-30, 30, 20)
    y = hyperbola(z, TRUTH_FOCUS)
    covered = np.zeros(3)
    close = 0
    for _ in range(100):
        r = fit_focus_hyperbola(DataSeries(z, y * (1 + 0.05 * rng.standard_normal(z.size)), 0.05 * y))
        covered += np.abs(r.parameters - TRUTH_FOCUS) <= 2 * r.parameter_sigmas
        close += np.all(np.abs(r.parameters[:2] - TRUTH_FOCUS[:2]) <= 0.1 * TRUTH_FOCUS[:2])
    assert np.all(covered >= 90), covered
    assert close >= 90


@pytest.mark.parametrize("y", [np.ones(9), np.linspace(1, 2, 9)])
def test_focus_degenerate(y):
    r = fit_focus_hyperbola(DataSeries(np.arange(9.0), y))
    assert not r.converged and "minimum" in r.message
    assert r.residual_norm >= 0 and np.all(r.parameter_sigmas >= 0)


def test_scalloped_roundtrip():
    x = scallop_x()
    r = fit_scalloped(DataSeries(x, scalloped_model(G, OM)(x, TRUTH_SCALLOP)), G, OM)
    assert r.converged
    assert r.parameters[0] == pytest.approx(7.6, rel=0.01)
    assert r.parameters[1] == pytest.approx(0.5, rel=0.01)


def test_scalloped_beta0():
    x = scallop_x()
    y = scalloped_model(G, OM)(x, [0.0, 0.5, 0.0, 1000.0, 50.0])
    r = fit_scalloped(DataSeries(x, y), G, OM)
    assert r.parameters[0] < 0.2


def test_scalloped_monte_carlo():
    rng = np.random.default_rng(76)
    x = scallop_x()
    y = scalloped_model(G, OM)(x, TRUTH_SCALLOP)
    hits = 0
    for _ in range(100):
        r = fit_scalloped(DataSeries(x, y + 0.03 * y.max() * rng.standard_normal(x.size)), G, OM)
        hits += abs(r.parameters[0] - 7.6) <= 0.5
    assert hits >= 90


def test_fwhm_of_series():
    assert fwhm_of_series(DataSeries([-1, 0, 1], [0, 1, 0])) == pytest.approx(1.0)
    x = np.linspace(-100, 100, 2001)
    y = 1 / (1 + (2 * x / 19.6) ** 2)
    assert fwhm_of_series(DataSeries(x, y)) == pytest.approx(19.6, rel=0.01)
    with pytest.raises(ValueError):
        fwhm_of_series(DataSeries(x, x))


def test_reorder_invariance():
    rng = np.random.default_rng(5)
    d = focus_data()
    y = d.y * (1 + 0.05 * rng.standard_normal(d.x.size))
    perm = rng.permutation(d.x.size)
    a = fit_focus_hyperbola(DataSeries(d.x, y))
    b = fit_focus_hyperbola(DataSeries(d.x[perm], y[perm]))
    np.testing.assert_array_equal(a.parameters, b.parameters)
    np.testing.assert_array_equal(a.parameter_sigmas, b.parameter_sigmas)
    assert a.residual_norm == b.residual_norm


def test_rescale_invariance():
    rng = np.random.default_rng(6)
    d = focus_data()
    y = d.y * (1 + 0.05 * rng.standard_normal(d.x.size))
    a = fit_focus_hyperbola(DataSeries(d.x, y))
    b = fit_focus_hyperbola(DataSeries(d.x * 1e-6, y))
    assert b.residual_norm == pytest.approx(a.residual_norm, rel=1e-9)
    assert b.parameters[1] == pytest.approx(a.parameters[1] * 1e-6, rel=1e-6)


def test_residual_not_worse_than_initial():
    rng = np.random.default_rng(7)
    d = focus_data()
    data = DataSeries(d.x, d.y + 0.2 * rng.standard_normal(d.x.size))
    p0 = [5.0, 5.0, 2.0]
    r = least_squares("hyperbola", data, p0)
    assert r.residual_norm <= np.linalg.norm(data.y - hyperbola(data.x, p0))


def test_initial_guess_independence():
    truth = np.array([3.7, 9.7, 1.0])
    d = focus_data(z0=1.0)
    for signs in itertools.product((0.5, 1.5), repeat=3):
        r = least_squares("hyperbola", d, truth * np.array(signs))
        assert r.converged
        np.testing.assert_allclose(r.parameters, truth, rtol=1e-6)
    x = scallop_x()
    truth = np.array([7.6, 0.5, 2 * math.pi * 3.0, 1000.0, 50.0])
    f = scalloped_model(G, OM)
    d = DataSeries(x, f(x, truth))
    # documented basin: beta from -50% to +30%, the other parameters +-50%
    for kb in (0.5, 1.3):
        for ks in itertools.product((0.5, 1.5), repeat=4):
            r = least_squares(f, d, truth * np.array((kb,) + ks))
            assert r.converged
            np.testing.assert_allclose(np.abs(r.parameters), truth, rtol=1e-6)


def test_weighted_fit_uses_sigmas():
    z = np.linspace(-30, 30, 21)
    y = hyperbola(z, TRUTH_FOCUS)
    y[0] += 5.0
    sig = np.ones_like(z)
    sig[0] = 1e3
    r = fit_focus_hyperbola(DataSeries(z, y, sig))
    assert r.parameters[1] == pytest.approx(9.7, rel=1e-3)

import numpy as np
import pytest

from dispwave.equations import (
    NoExactSolution,
    catalog_names,
    eval_symbol,
    exact_solution,
    exact_waveheight_for_speed,
    kdv_solitary,
    make_equation,
)


def test_catalog_names():
    names = catalog_names()
    for expected in ("kdv", "gkdv", "whitham", "bo", "mbo", "benjamin"):
        assert expected in names


def test_make_equation_rejects_unknown_name():
    with pytest.raises(KeyError):
        make_equation("airy", 2 * np.pi)


def test_make_equation_parameter_checking():
    with pytest.raises(TypeError):
        make_equation("kdv", 2 * np.pi, tau=0.5)
    with pytest.raises(TypeError):
        make_equation("benjamin", 2 * np.pi)  # tau required
    with pytest.raises(TypeError):
        make_equation("gkdv", 2 * np.pi)  # p required
    with pytest.raises(ValueError):
        make_equation("gkdv", 2 * np.pi, p=0)


def test_symbols_are_even_functions():
    rng = np.random.default_rng(7)
    k = rng.uniform(0.1, 12.0, size=40)
    cases = [
        make_equation("kdv", 2 * np.pi),
        make_equation("whitham", 2 * np.pi),
        make_equation("bo", 2 * np.pi),
        make_equation("benjamin", 2 * np.pi, tau=0.3),
        make_equation("gkdv", 2 * np.pi, p=3),
    ]
    for eq in cases:
        np.testing.assert_allclose(eval_symbol(eq, k), eval_symbol(eq, -k), rtol=0, atol=1e-15)


def test_kdv_symbol_values():
    eq = make_equation("kdv", 2 * np.pi)
    np.testing.assert_allclose(eval_symbol(eq, np.array([0.0, 1.0])), [1.0, 5.0 / 6.0])


def test_whitham_symbol_matches_formula_and_taylor_branch():
    eq = make_equation("whitham", 2 * np.pi)
    k = np.array([0.5, 1.0, 2.0, 10.0])
    np.testing.assert_allclose(eval_symbol(eq, k), np.sqrt(np.tanh(k) / k), rtol=1e-14)
    # near zero the Taylor branch takes over smoothly
    small = np.array([1e-5, 1e-6])
    np.testing.assert_allclose(eval_symbol(eq, small), 1.0 - small**2 / 6.0, rtol=1e-12)
    assert eval_symbol(eq, 0.0) == 1.0


def test_benjamin_symbol_dual_bifurcation_speeds():
    eq = make_equation("benjamin", 4 * np.pi, tau=0.1)
    # the same speed occurs at two wavenumbers: this degeneracy drives
    # the dual-period bifurcation checks downstream
    np.testing.assert_allclose(eval_symbol(eq, np.array([0.5, 9.5])), [0.525, 0.525], rtol=1e-15)
    np.testing.assert_allclose(eval_symbol(eq, 10.0), 1.0, rtol=1e-15)


def test_flux_consistency():
    rng = np.random.default_rng(11)
    u = rng.standard_normal(50)
    h = 1e-6
    for name, kw in (("kdv", {}), ("whitham", {}), ("mbo", {}), ("benjamin", {"tau": 0.2})):
        eq = make_equation(name, 2 * np.pi, **kw)
        fd = (eq.flux(u + h) - eq.flux(u - h)) / (2 * h)
        np.testing.assert_allclose(fd, eq.flux_prime(u), rtol=1e-6, atol=1e-6)
        fd2 = (eq.flux_antideriv(u + h) - eq.flux_antideriv(u - h)) / (2 * h)
        np.testing.assert_allclose(fd2, eq.flux(u), rtol=1e-6, atol=1e-6)


def test_kdv_solitary_profile_and_speed():
    profile, c = kdv_solitary(1.0)
    assert c == 1.5
    assert profile(0.0) == pytest.approx(1.0)
    x = np.linspace(-30, 30, 101)
    vals = profile(x)
    assert np.all(vals > 0)
    assert vals.max() == pytest.approx(1.0)
    # integrated steady equation: -c phi + phi + (3/4) phi^2 + phi''/6 = 0
    h = 1e-4
    phixx = (profile(x + h) - 2 * vals + profile(x - h)) / h**2
    resid = -c * vals + vals + 0.75 * vals**2 + phixx / 6.0
    assert np.max(np.abs(resid)) < 1e-5


def test_kdv_solitary_rejects_nonpositive_height():
    with pytest.raises(ValueError):
        kdv_solitary(0.0)


def test_exact_solution_dispatch():
    eq = make_equation("kdv", 60.0)
    profile, c = exact_solution(eq, 0.8)
    assert c == pytest.approx(1.4)
    with pytest.raises(NoExactSolution):
        exact_solution(make_equation("whitham", 2 * np.pi), 0.5)


def test_exact_waveheight_for_speed_inverts_speed_relation():
    eq = make_equation("kdv", 60.0)
    for a in (0.3, 1.2651):
        _, c = exact_solution(eq, a)
        assert exact_waveheight_for_speed(eq, c) == pytest.approx(a, rel=1e-14)
    with pytest.raises(ValueError):
        exact_waveheight_for_speed(eq, 0.9)  # height would be negative
    with pytest.raises(NoExactSolution):
        exact_waveheight_for_speed(make_equation("bo", 60.0), 1.2)

import numpy as np
import pytest

import dispwave as dw
from dispwave.diagnostics import (
    InsufficientData,
    branch_report,
    classify_stability,
    crest_count,
    cusp_ratio,
    cyclic_crest_count,
    dprime_check,
    dprime_mismatch,
    fit_decay,
    functionals,
)
from dispwave.spectral import Wave, make_grid


def test_momentum_of_cosine():
    # V = (1/2) int phi^2 over one period: for cos on L=2*pi this is pi/2
    eq = dw.make_equation("kdv", 2 * np.pi)
    grid = make_grid(2 * np.pi, 64)
    wave = Wave(grid, np.cos(grid.nodes))
    f = functionals(eq, wave, 1.0)
    assert f.v == pytest.approx(np.pi / 2, rel=1e-12)


def test_functionals_gradient_identity():
    # E and V satisfy E'(phi) - c V'(phi) = steady residual (up to B):
    # directional derivatives of d = cV - E against random perturbations
    # must match the quadrature pairing with the steady residual
    rng = np.random.default_rng(23)
    eq = dw.make_equation("whitham", 2 * np.pi)
    grid = make_grid(2 * np.pi, 64)
    pt = dw.solve_at_waveheight(eq, dw.HomogeneousB(), grid, 0.2, options=dw.NavigationOptions(step=0.02))
    wave, c = pt.wave, pt.c
    w = grid.length / grid.n
    h = 1e-6
    for _ in range(3):
        v = rng.standard_normal(grid.n)
        up = Wave(grid, wave.samples + h * v)
        dn = Wave(grid, wave.samples - h * v)
        dd = (functionals(eq, up, c).d - functionals(eq, dn, c).d) / (2 * h)
        # at a solution with B=0 the steady residual vanishes, so the
        # derivative of d at fixed c is zero up to discretization
        assert abs(dd) <= 10 * 1e-6 * max(1.0, abs(functionals(eq, wave, c).d)) + 1e-9


def test_dprime_identity_manufactured():
    # d(c) = c^2 has d' = 2c; feeding v = 2c must give zero mismatch
    c = np.linspace(1.0, 2.0, 21)
    rep = dprime_mismatch(c, c**2, 2 * c)
    inner = rep.mismatch[1:-1]
    assert np.nanmax(inner) < 1e-10
    # and a wrong v is flagged
    rep_bad = dprime_mismatch(c, c**2, 2 * c + 0.1)
    assert np.nanmin(rep_bad.mismatch[1:-1]) > 1e-3


def test_dprime_handles_nonuniform_and_degenerate_spacing():
    c = np.array([1.0, 1.01, 1.013, 1.013 + 1e-13, 1.02])
    d = c**2
    v = 2 * c
    rep = dprime_mismatch(c, d, v)
    # the stencil straddling the repeated speed is skipped, not wrong
    assert np.isnan(rep.mismatch[2]) or rep.mismatch[2] < 1e-6 or np.isnan(rep.mismatch[3])
    with pytest.raises(ValueError):
        dprime_mismatch(c[:2], d[:2], v[:2])


def test_dprime_check_on_kdv_branch():
    eq = dw.make_equation("kdv", 2 * np.pi)
    grid = make_grid(2 * np.pi, 64)
    opts = dw.NavigationOptions(step=0.02)
    br = dw.bootstrap(eq, dw.MeanZero(), grid, waveheight=1e-3, options=opts)
    dw.extend(br, 20, opts)
    rep = dprime_check(eq, br.points)
    ok = np.isfinite(rep.mismatch) & (rep.spacing > 1e-4)
    assert ok.sum() >= 10
    assert np.max(rep.mismatch[ok]) <= 0.01


def test_cusp_ratio():
    grid = make_grid(2 * np.pi, 32)
    samples = 0.4 * np.cos(grid.nodes)
    wave = Wave(grid, samples)
    assert cusp_ratio(0.9, wave) == pytest.approx(0.9 / samples.max(), rel=1e-12)
    flat = Wave(grid, np.zeros(32))
    assert cusp_ratio(0.9, flat) == np.inf


def test_cyclic_crest_count_examples():
    x = np.linspace(0, 2 * np.pi, 200, endpoint=False)
    assert cyclic_crest_count(np.cos(x)) == 1
    assert cyclic_crest_count(np.cos(x) + 0.3 * np.cos(2 * x - 0.4)) in (1, 2)
    assert cyclic_crest_count(np.full(200, 2.5)) == 0
    two_bumps = np.exp(-8 * (x - 2) ** 2) + np.exp(-8 * (x - 5) ** 2)
    assert cyclic_crest_count(two_bumps) == 2


def test_cyclic_crest_count_quantization_suppresses_ripple():
    # a clipped cosine has a flat top; machine-scale noise on the
    # plateau must not register as extra crests once quantized
    x = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    rng = np.random.default_rng(31)
    clipped = np.minimum(np.cos(x), 0.5)
    noisy = clipped + 1e-12 * rng.standard_normal(400)
    assert cyclic_crest_count(noisy, resolution=1e-8) == 1
    # without quantization the plateau ripples all count
    assert cyclic_crest_count(noisy) > 1


def test_crest_count_on_waves():
    grid = make_grid(2 * np.pi, 128)
    assert crest_count(Wave(grid, np.cos(grid.nodes))) == 1
    assert crest_count(Wave(grid, np.zeros(128))) == 0
    # a two-crest (second harmonic) state on the half period
    assert crest_count(Wave(grid, np.cos(2 * grid.nodes))) == 2


def test_fit_decay_exponential_oracle():
    grid = make_grid(2 * np.pi, 256)
    k = grid.wavenumbers
    coef = np.zeros(256)
    coef[0] = 1.0
    coef[1:] = 2.0 * np.exp(-0.5 * k[1:])
    fit = fit_decay(Wave.from_coefficients(grid, coef))
    assert fit.winner == "exponential"
    assert fit.nu1 == pytest.approx(2.0, rel=1e-2)
    assert fit.nu2 == pytest.approx(0.5, rel=1e-4)
    assert fit.n_exp == pytest.approx(1.0, abs=1e-9)
    assert fit.aic_exp < fit.aic_poly


def test_fit_decay_stretched_exponential_oracle():
    grid = make_grid(2 * np.pi, 256)
    k = grid.wavenumbers
    coef = np.zeros(256)
    coef[0] = 1.0
    coef[1:] = 1.5 * np.exp(-0.8 * k[1:] ** 0.5)
    fit = fit_decay(Wave.from_coefficients(grid, coef))
    assert fit.winner == "exponential"
    assert fit.n_exp == pytest.approx(0.5, abs=0.051)
    assert fit.nu2 == pytest.approx(0.8, rel=0.05)


def test_fit_decay_polynomial_oracle():
    grid = make_grid(2 * np.pi, 256)
    k = grid.wavenumbers
    coef = np.zeros(256)
    coef[0] = 1.0
    coef[1:] = 1.0 / (1.0 + 1.0 * k[1:] ** 3)
    fit = fit_decay(Wave.from_coefficients(grid, coef))
    assert fit.winner == "polynomial"
    assert fit.mu1 == pytest.approx(1.0, rel=1e-3)
    assert fit.mu3 == pytest.approx(1.0, rel=1e-2)
    assert fit.m_poly == pytest.approx(3.0, abs=0.051)
    assert fit.aic_poly < fit.aic_exp


def test_fit_decay_scale_equivariance():
    grid = make_grid(2 * np.pi, 128)
    k = grid.wavenumbers
    coef = np.zeros(128)
    coef[0] = 1.0
    coef[1:] = np.exp(-0.4 * k[1:])
    base = fit_decay(Wave.from_coefficients(grid, coef))
    scaled = fit_decay(Wave.from_coefficients(grid, 7.5 * coef))
    assert scaled.winner == base.winner
    # the absolute coefficient floor shifts the window slightly under
    # scaling, so equivariance is exact only to the tail noise level
    assert scaled.nu2 == pytest.approx(base.nu2, rel=1e-4)
    assert scaled.n_exp == pytest.approx(base.n_exp, abs=1e-12)
    assert scaled.nu1 == pytest.approx(7.5 * base.nu1, rel=1e-3)


def test_fit_decay_insufficient_data():
    grid = make_grid(2 * np.pi, 64)
    coef = np.zeros(64)
    coef[0] = 1.0
    coef[1:6] = 0.1  # only 5 usable modes
    with pytest.raises(InsufficientData):
        fit_decay(Wave.from_coefficients(grid, coef))


def test_fit_decay_ignores_aliased_top_modes():
    # junk above N/2 must not influence the fitted model
    grid = make_grid(2 * np.pi, 256)
    k = grid.wavenumbers
    coef = np.zeros(256)
    coef[0] = 1.0
    coef[1:] = 2.0 * np.exp(-0.5 * k[1:])
    dirty = coef.copy()
    dirty[129:] = 1e-3
    clean_fit = fit_decay(Wave.from_coefficients(grid, coef))
    dirty_fit = fit_decay(Wave.from_coefficients(grid, dirty))
    assert dirty_fit.winner == clean_fit.winner
    assert dirty_fit.nu2 == pytest.approx(clean_fit.nu2, rel=1e-4)


def test_classify_stability_turning_point():
    # manufactured fold: c decreases then increases while V keeps rising
    eq = dw.make_equation("whitham", 2 * np.pi)
    grid = make_grid(2 * np.pi, 64)
    opts = dw.NavigationOptions(step=0.02)
    br = dw.bootstrap(eq, dw.HomogeneousB(), grid, waveheight=1e-3, options=opts)
    dw.extend(br, 25, opts)
    rep = classify_stability(eq, br.points)
    assert rep.stable.dtype == bool
    assert rep.stable[1]  # small waves are on the stable side
    assert 0 <= rep.inversion_index < len(br.points)


def test_branch_report_landmarks_restricted_to_physical_segment():
    eq = dw.make_equation("whitham", 2 * np.pi)
    grid = make_grid(2 * np.pi, 256)
    opts = dw.NavigationOptions(step=0.01)
    br = dw.bootstrap(eq, dw.HomogeneousB(), grid, waveheight=1e-3, options=opts)
    dw.extend(br, 110, opts)
    rep = branch_report(eq, br.points, boundary="homogeneous-b", termination=br.termination)
    assert rep.terminal_index is not None
    # one crest everywhere up to the terminal
    for pd in rep.points[: rep.terminal_index + 1]:
        if pd.index > 0:
            assert pd.crests == 1
    assert rep.turning_index <= rep.terminal_index
    assert rep.max_l2_index <= rep.terminal_index
    assert rep.turning_index > 0
    d = rep.to_dict()
    assert d["terminal_index"] == rep.terminal_index
    assert isinstance(d["points"], list)


def test_cusp_ratio_monotone_on_upper_branch():
    eq = dw.make_equation("whitham", 2 * np.pi)
    grid = make_grid(2 * np.pi, 256)
    opts = dw.NavigationOptions(step=0.01)
    br = dw.bootstrap(eq, dw.HomogeneousB(), grid, waveheight=1e-3, options=opts)
    dw.extend(br, 80, opts)
    ratios = [cusp_ratio(p.c, p.wave) for p in br.points[1:]]
    diffs = np.diff(ratios)
    assert np.all(diffs < 0)

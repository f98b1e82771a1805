"""Branch diagnostics: invariant functionals, stability signs, shape
measures, and coefficient-decay model fits.

The functionals are quadratures over one full period of the even
extension; on the shifted half-period grid the midpoint rule with
weight L/N is spectrally accurate for resolved profiles.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equations import Equation
from .solver import SolutionPoint
from .spectral import Wave, apply_operator, series_eval

__all__ = [
    "InsufficientData",
    "Functionals",
    "functionals",
    "DPrimeReport",
    "dprime_mismatch",
    "dprime_check",
    "StabilityReport",
    "classify_stability",
    "cusp_ratio",
    "cyclic_crest_count",
    "crest_count",
    "FitReport",
    "fit_decay",
    "PointDiagnostics",
    "BranchReport",
    "branch_report",
]

_COEFF_FLOOR = 1e-14
_MIN_FIT_POINTS = 16
_DEGENERATE_SPACING = 1e-10


class InsufficientData(Exception):
    """Too few usable coefficients to fit a decay model."""


@dataclass(frozen=True)
class Functionals:
    """Momentum-type and energy-type functionals of a steady profile.

    v is (1/2) int phi^2 over a period; e is int (F(phi) + (1/2) phi
    L phi) with F the flux antiderivative; d = c*v - e is oriented so
    that d'(c) = v holds exactly along families with either zero mean
    or zero integration constant.
    """

    v: float
    e: float
    d: float


def functionals(eq: Equation, wave: Wave, c: float) -> Functionals:
    w = wave.grid.length / wave.grid.n
    phi = wave.samples
    lphi = apply_operator(eq, wave).samples
    v = 0.5 * w * float(np.sum(phi**2))
    e = w * float(np.sum(eq.flux_antideriv(phi) + 0.5 * phi * lphi))
    return Functionals(v=v, e=e, d=c * v - e)


@dataclass(frozen=True, eq=False)
class DPrimeReport:
    """Finite-difference check of the identity d'(c) = v along a branch.

    ``mismatch[k]`` is |d'_fd(c_k) - v_k| / max(|v_k|, tiny) at interior
    points, NaN where the three-point stencil is degenerate; ``spacing``
    holds |c_{k+1} - c_{k-1}|.
    """

    c: np.ndarray
    v: np.ndarray
    d: np.ndarray
    mismatch: np.ndarray
    spacing: np.ndarray
    skipped: tuple[int, ...]


def dprime_mismatch(c, d, v) -> DPrimeReport:
    """Three-point nonuniform finite differences of d against v."""
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)
    v = np.asarray(v, dtype=float)
    if c.size < 3:
        raise ValueError("need at least three points for the interior stencil")
    n = c.size
    mism = np.full(n, np.nan)
    spacing = np.full(n, np.nan)
    skipped = []
    for k in range(1, n - 1):
        hp = c[k + 1] - c[k]
        hm = c[k] - c[k - 1]
        spacing[k] = abs(c[k + 1] - c[k - 1])
        if min(abs(hp), abs(hm), abs(hp + hm)) < _DEGENERATE_SPACING:
            skipped.append(k)
            continue
        deriv = (hm**2 * d[k + 1] - hp**2 * d[k - 1] + (hp**2 - hm**2) * d[k]) / (
            hp * hm * (hp + hm)
        )
        mism[k] = abs(deriv - v[k]) / max(abs(v[k]), 1e-300)
    return DPrimeReport(c=c, v=v, d=d, mismatch=mism, spacing=spacing, skipped=tuple(skipped))


def dprime_check(eq: Equation, points: list[SolutionPoint]) -> DPrimeReport:
    """Evaluate the d'(c) = v identity on computed branch points."""
    c = np.array([p.c for p in points])
    funcs = [functionals(eq, p.wave, p.c) for p in points]
    d = np.array([f.d for f in funcs])
    v = np.array([f.v for f in funcs])
    return dprime_mismatch(c, d, v)


@dataclass(frozen=True, eq=False)
class StabilityReport:
    """Two views of branch stability.

    ``signs`` holds the pointwise sign of dv/dc computed with arclength
    parametrization (the local d''(c) sign; zero where the speed is
    locally stationary).  ``inversion_index`` is the point of maximal L2
    norm, where the sign change that separates stable from unstable
    segments is located; ``stable`` flags points at or before it.
    """

    signs: np.ndarray
    dvdc: np.ndarray
    inversion_index: int
    stable: np.ndarray


def _stability_from_arrays(c, a, v, physical_end: int | None = None) -> StabilityReport:
    c = np.asarray(c, dtype=float)
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    if c.size < 2:
        raise ValueError("need at least two points")
    seg = np.hypot(np.diff(c), np.diff(a))
    seg = np.where(seg > 0, seg, 1e-300)
    t = np.concatenate([[0.0], np.cumsum(seg)])
    dv = np.gradient(v, t)
    dc = np.gradient(c, t)
    scale = max(float(np.max(np.abs(dc))), 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        dvdc = np.where(np.abs(dc) > 1e-14 * scale, dv / dc, np.nan)
    signs = np.zeros(c.size, dtype=int)
    ok = np.abs(dc) > 1e-14 * scale
    signs[ok] = np.sign(dv[ok] * dc[ok]).astype(int)
    end = c.size - 1 if physical_end is None else physical_end
    inversion = int(np.argmax(v[: end + 1]))
    stable = np.arange(c.size) <= inversion
    return StabilityReport(signs=signs, dvdc=dvdc, inversion_index=inversion, stable=stable)


def classify_stability(eq: Equation, points: list[SolutionPoint]) -> StabilityReport:
    """Sign of d''(c) = dv/dc along the branch, arclength-parametrized.

    The parametrization by arclength in the (c, a) plane keeps the
    derivative well defined across speed turning points.  The stability
    inversion is anchored at the point of maximal L2 norm.
    """
    c = np.array([p.c for p in points])
    a = np.array([p.a for p in points])
    v = np.array([functionals(eq, p.wave, p.c).v for p in points])
    return _stability_from_arrays(c, a, v)


def cusp_ratio(c: float, wave: Wave) -> float:
    """Speed over crest height, c / max phi.

    Approaches 3/2 from above as a branch steepens toward its cusped
    terminal wave.  Infinite for profiles without a positive crest.
    """
    peak = float(np.max(wave.samples))
    if peak <= 0.0:
        return float("inf")
    return float(c) / peak


def cyclic_crest_count(values, resolution: float = 0.0) -> int:
    """Strict local maxima of a periodic sample sequence.

    Neighbors wrap around; a plateau flanked by smaller values on both
    sides counts once.  A constant sequence has no crest.  A positive
    ``resolution`` quantizes the samples to that fraction of the total
    range first, so that wiggles below it merge into plateaus.
    """
    u = np.asarray(values, dtype=float)
    if u.ndim != 1 or u.size < 3:
        raise ValueError("need a 1-d sequence of at least 3 samples")
    if resolution > 0.0:
        span = float(np.max(u) - np.min(u))
        if span == 0.0:
            return 0
        u = np.round(u / (resolution * span))
    diffs = np.roll(u, -1) - u
    signs = np.sign(diffs)
    nz = signs[signs != 0.0]
    if nz.size == 0:
        return 0
    nxt = np.roll(nz, -1)
    return int(np.sum((nz > 0) & (nxt < 0)))


_CREST_RESOLUTION = 1e-8


def crest_count(wave: Wave) -> int:
    """Crest count of the even periodic extension of a half-period wave.

    Counted at a relative resolution of 1e-8 so that rounding-level
    ripples in flat solitary-wave tails do not register as crests.
    """
    grid = wave.grid
    m = 2 * grid.n
    x = grid.length * np.arange(m) / m
    return cyclic_crest_count(series_eval(wave, x), resolution=_CREST_RESOLUTION)


@dataclass(frozen=True)
class FitReport:
    """Competing decay-model fits to the coefficient magnitudes.

    Exponential model nu1*exp(-nu2*k^n) against polynomial model
    mu1/(mu2 + mu3*k^m) with mu2 normalized to 1.  Both models are
    fitted and scored on the log-magnitudes, where exponential decay is
    a straight line in k and algebraic decay a straight line in log k,
    so the two regimes separate cleanly; the lower AIC wins.
    """

    nu1: float
    nu2: float
    n_exp: float
    mu1: float
    mu2: float
    mu3: float
    m_poly: float
    residual_l2_exp: float
    residual_l2_poly: float
    aic_exp: float
    aic_poly: float
    winner: str
    n_obs: int


_EXPONENT_GRID = np.arange(0.25, 4.0 + 1e-12, 0.05)
_N_PARAMS = 3  # scale, rate, exponent in either model


def _aic(rss: float, n_obs: int) -> float:
    return n_obs * float(np.log(max(rss, 1e-300) / n_obs)) + 2 * _N_PARAMS


def _poly_log_rss(log_y: np.ndarray, basis: np.ndarray, beta: float):
    # log-space residual of mu1/(1 + mu3*z) at mu3 = exp(beta), with the
    # optimal mu1 eliminated in closed form
    shape = np.log1p(np.exp(beta) * basis)
    intercept = float(np.mean(log_y + shape))
    resid = log_y - (intercept - shape)
    return float(np.sum(resid**2)), intercept


def _fit_poly_shape(log_y: np.ndarray, basis: np.ndarray) -> tuple[float, float, float]:
    """Best (rss, mu1, mu3) of the normalized polynomial model."""
    betas = np.linspace(-30.0, 30.0, 25)
    scanned = [_poly_log_rss(log_y, basis, b)[0] for b in betas]
    i = int(np.argmin(scanned))
    lo = betas[max(i - 1, 0)]
    hi = betas[min(i + 1, betas.size - 1)]
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    a_pt, b_pt = hi - golden * (hi - lo), lo + golden * (hi - lo)
    fa, _ = _poly_log_rss(log_y, basis, a_pt)
    fb, _ = _poly_log_rss(log_y, basis, b_pt)
    for _ in range(48):
        if fa < fb:
            hi, b_pt, fb = b_pt, a_pt, fa
            a_pt = hi - golden * (hi - lo)
            fa, _ = _poly_log_rss(log_y, basis, a_pt)
        else:
            lo, a_pt, fa = a_pt, b_pt, fb
            b_pt = lo + golden * (hi - lo)
            fb, _ = _poly_log_rss(log_y, basis, b_pt)
    beta = 0.5 * (lo + hi)
    rss, intercept = _poly_log_rss(log_y, basis, beta)
    return rss, float(np.exp(intercept)), float(np.exp(beta))


def fit_decay(wave: Wave) -> FitReport:
    """Fit both decay models to the usable coefficient magnitudes.

    Usable means mode index 1 <= l <= N/2 and magnitude above 1e-14.
    Modes above N/2 are excluded: the collocation product aliases the
    top of the spectrum, and the spurious roll-off there would bias
    the fit.  The exponent of each model is scanned on a fixed grid;
    the remaining parameters are fitted on the log-magnitudes (linear
    least squares for the exponential model, a one-dimensional search
    with the scale eliminated for the polynomial one).  Residual norms
    and AIC refer to the log-magnitude residuals.

    Raises:
        InsufficientData: fewer than 16 usable coefficients.
    """
    grid = wave.grid
    top = grid.n // 2
    mags = np.abs(wave.coefficients[1 : top + 1])
    ks = grid.wavenumbers[1 : top + 1]
    usable = mags > _COEFF_FLOOR
    k = ks[usable]
    y = mags[usable]
    n_obs = int(y.size)
    if n_obs < _MIN_FIT_POINTS:
        raise InsufficientData(
            f"only {n_obs} coefficients above {_COEFF_FLOOR:g}; need {_MIN_FIT_POINTS}"
        )

    log_y = np.log(y)
    ones = np.ones(n_obs)

    best_exp = (np.inf, 1.0, 0.0, 1.0)  # rss, nu1, nu2, n
    best_poly = (np.inf, 1.0, 0.0, 1.0)  # rss, mu1, mu3, m
    for expo in _EXPONENT_GRID:
        basis = k**expo

        design = np.column_stack([ones, basis])
        coef, *_ = np.linalg.lstsq(design, log_y, rcond=None)
        resid = log_y - design @ coef
        rss = float(np.sum(resid**2))
        if not np.isfinite(rss):
            rss = np.inf
        if rss < best_exp[0]:
            best_exp = (rss, float(np.exp(coef[0])), float(-coef[1]), float(expo))

        rss, mu1, mu3 = _fit_poly_shape(log_y, basis)
        if not np.isfinite(rss):
            rss = np.inf
        if rss < best_poly[0]:
            best_poly = (rss, mu1, mu3, float(expo))

    rss_e, nu1, nu2, n_e = best_exp
    rss_p, mu1, mu3, m_p = best_poly
    aic_e = _aic(rss_e, n_obs)
    aic_p = _aic(rss_p, n_obs)
    return FitReport(
        nu1=nu1,
        nu2=nu2,
        n_exp=n_e,
        mu1=mu1,
        mu2=1.0,
        mu3=mu3,
        m_poly=m_p,
        residual_l2_exp=float(np.sqrt(rss_e)) if np.isfinite(rss_e) else float("inf"),
        residual_l2_poly=float(np.sqrt(rss_p)) if np.isfinite(rss_p) else float("inf"),
        aic_exp=aic_e,
        aic_poly=aic_p,
        winner="exponential" if aic_e <= aic_p else "polynomial",
        n_obs=n_obs,
    )


@dataclass(frozen=True, eq=False)
class PointDiagnostics:
    index: int
    c: float
    a: float
    b: float
    theta: float
    l2: float
    v: float
    e: float
    d: float
    crests: int
    cusp: float
    stability_sign: int
    dvdc: float
    dprime_mismatch: float
    fit: FitReport | None
    refine_failure: str | None = None


@dataclass(frozen=True, eq=False)
class BranchReport:
    """Aggregated diagnostics for a computed branch."""

    equation: str
    boundary: str
    grid_n: int
    length: float
    termination: str | None
    points: tuple[PointDiagnostics, ...]
    turning_index: int
    max_l2_index: int
    terminal_index: int
    inversion_index: int
    cusp_ratio_terminal: float

    def to_dict(self) -> dict:
        def num(x):
            x = float(x)
            return x if np.isfinite(x) else None

        pts = []
        for p in self.points:
            fit = None
            if p.fit is not None:
                fit = {
                    "nu1": num(p.fit.nu1),
                    "nu2": num(p.fit.nu2),
                    "n_exp": num(p.fit.n_exp),
                    "mu1": num(p.fit.mu1),
                    "mu2": num(p.fit.mu2),
                    "mu3": num(p.fit.mu3),
                    "m_poly": num(p.fit.m_poly),
                    "residual_l2_exp": num(p.fit.residual_l2_exp),
                    "residual_l2_poly": num(p.fit.residual_l2_poly),
                    "aic_exp": num(p.fit.aic_exp),
                    "aic_poly": num(p.fit.aic_poly),
                    "winner": p.fit.winner,
                    "n_obs": p.fit.n_obs,
                }
            pts.append(
                {
                    "index": p.index,
                    "c": num(p.c),
                    "a": num(p.a),
                    "b": num(p.b),
                    "theta": num(p.theta),
                    "l2": num(p.l2),
                    "v": num(p.v),
                    "e": num(p.e),
                    "d": num(p.d),
                    "crests": p.crests,
                    "cusp_ratio": num(p.cusp),
                    "stability_sign": p.stability_sign,
                    "dvdc": num(p.dvdc) if not np.isnan(p.dvdc) else None,
                    "dprime_mismatch": num(p.dprime_mismatch)
                    if not np.isnan(p.dprime_mismatch)
                    else None,
                    "fit": fit,
                    "refine_failure": p.refine_failure,
                }
            )
        return {
            "equation": self.equation,
            "boundary": self.boundary,
            "grid_n": self.grid_n,
            "length": self.length,
            "termination": self.termination,
            "turning_index": self.turning_index,
            "max_l2_index": self.max_l2_index,
            "terminal_index": self.terminal_index,
            "inversion_index": self.inversion_index,
            "cusp_ratio_terminal": num(self.cusp_ratio_terminal),
            "points": pts,
        }


def branch_report(
    eq: Equation,
    points: list[SolutionPoint],
    boundary: str = "",
    termination: str | None = None,
    failed: dict[int, str] | None = None,
) -> BranchReport:
    """Diagnose a full branch.

    The terminal index is the last point whose profile has a single
    crest before the count first changes (the appearance of extra
    crests is the symptom of stepping past the branch end); if the
    count never changes it is the last point.  The zero-amplitude
    bootstrap point, which has no crest at all, is ignored for that
    scan.  Landmark indices (turning, max L2, stability inversion) are
    searched on the physical segment up to the terminal index only,
    since continuation may keep converging onto spurious states past
    the branch end.
    """
    if not points:
        raise ValueError("empty branch")
    failed = failed or {}
    c = np.array([p.c for p in points])
    a = np.array([p.a for p in points])
    funcs = [functionals(eq, p.wave, p.c) for p in points]
    v = np.array([f.v for f in funcs])
    d = np.array([f.d for f in funcs])
    l2 = np.array([p.wave.l2_norm() for p in points])
    crests = [crest_count(p.wave) for p in points]
    cusps = [cusp_ratio(p.c, p.wave) for p in points]

    fits: list[FitReport | None] = []
    for p in points:
        try:
            fits.append(fit_decay(p.wave))
        except InsufficientData:
            fits.append(None)

    terminal = len(points) - 1
    for i, count in enumerate(crests):
        if i == 0 and points[i].a == 0.0:
            continue
        if count != 1:
            terminal = max(i - 1, 0)
            break

    stab = _stability_from_arrays(c, a, v, physical_end=terminal)
    if len(points) >= 3:
        dpr = dprime_mismatch(c, d, v)
        mism = dpr.mismatch
    else:
        mism = np.full(len(points), np.nan)

    diag_points = tuple(
        PointDiagnostics(
            index=i,
            c=float(points[i].c),
            a=float(points[i].a),
            b=float(points[i].b),
            theta=float(points[i].theta),
            l2=float(l2[i]),
            v=float(v[i]),
            e=float(funcs[i].e),
            d=float(d[i]),
            crests=crests[i],
            cusp=cusps[i],
            stability_sign=1 if stab.stable[i] else -1,
            dvdc=float(stab.dvdc[i]),
            dprime_mismatch=float(mism[i]),
            fit=fits[i],
            refine_failure=failed.get(i),
        )
        for i in range(len(points))
    )
    grid = points[-1].wave.grid
    return BranchReport(
        equation=eq.label(),
        boundary=boundary,
        grid_n=grid.n,
        length=grid.length,
        termination=termination,
        points=diag_points,
        turning_index=int(np.argmin(c[: terminal + 1])),
        max_l2_index=int(np.argmax(l2[: terminal + 1])),
        terminal_index=terminal,
        inversion_index=stab.inversion_index,
        cusp_ratio_terminal=cusps[terminal],
    )

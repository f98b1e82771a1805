"""Small-amplitude expansions near the bifurcation point.

Nontrivial waves bifurcate from the zero state at speed c0 = alpha(k0),
k0 = 2*pi/L, with profile proportional to xi1 = cos(k0 x).  Writing
p >= 2 for the degree of the first nonvanishing flux derivative at 0
and f_p for its Taylor coefficient, the expansion

    phi = eps*xi1 + eps^p*xi_p,    c = c0 + eps^(p-1)*c_corr

satisfies the steady equation to order eps^(p+1).  With xi1 normalized
in L2 over one period, the solvability condition gives

    c_corr = f_p * <xi1^p, xi1>,

and xi_p solves (L - c0) xi_p = c_corr*xi1 - f_p*xi1^p mode by mode,
with its xi1 component set to zero.  For quadratic fluxes (p = 2) the
odd pairing makes c_corr vanish identically; for even p >= 4 it also
vanishes and the expansion is flagged so callers can fall back to the
first-order guess.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equations import Equation
from .spectral import Grid, Wave, forward

__all__ = [
    "ResonantMode",
    "StokesExpansion",
    "bifurcation_wavenumber",
    "bifurcation_speed",
    "first_order_wave",
    "correction",
    "initial_guess",
]

# A nonzero mode whose symbol value collides with c0 makes the mode-wise
# division ill posed.
_RESONANCE_TOL = 1e-10
_VANISH_TOL = 1e-12


class ResonantMode(Exception):
    """A grid mode other than the first resonates with the bifurcation speed."""

    def __init__(self, mode: int, wavenumber: float):
        super().__init__(
            f"mode {mode} (k = {wavenumber:.6g}) resonates with the "
            f"bifurcating mode; the expansion is not defined on this grid"
        )
        self.mode = mode
        self.wavenumber = wavenumber


@dataclass(frozen=True, eq=False)
class StokesExpansion:
    """Expansion data at the bifurcation point of one equation/grid pair."""

    wavenumber: float
    speed: float
    xi1: Wave
    order: int
    speed_correction: float
    xi_p: Wave
    correction_vanishes: bool


def bifurcation_wavenumber(eq: Equation) -> float:
    return 2.0 * np.pi / eq.length


def bifurcation_speed(eq: Equation) -> float:
    """Speed at which the first cosine mode bifurcates: alpha(2*pi/L)."""
    return float(eq.symbol(bifurcation_wavenumber(eq)))


def first_order_wave(grid: Grid, waveheight: float) -> Wave:
    """Leading-order guess (a/2)*cos(k0 x) with crest-to-trough height ~a."""
    k0 = 2.0 * np.pi / grid.length
    return Wave(grid, 0.5 * waveheight * np.cos(k0 * grid.nodes))


def correction(eq: Equation, grid: Grid) -> StokesExpansion:
    """Compute the p-th order correction term on the given grid.

    Raises:
        ResonantMode: some nonzero grid mode l != 1 has
            |alpha(kappa_l) - c0| < 1e-10, so the mode-wise inversion
            is ill posed (the expansion itself breaks down there).
    """
    k0 = bifurcation_wavenumber(eq)
    c0 = bifurcation_speed(eq)
    alpha = np.asarray(eq.symbol(grid.wavenumbers), dtype=float)
    denom = alpha - c0
    clash = np.abs(denom) < _RESONANCE_TOL
    clash[1] = False
    if np.any(clash):
        mode = int(np.argmax(clash))
        raise ResonantMode(mode, float(grid.wavenumbers[mode]))

    length = grid.length
    quad = length / grid.n  # full-period quadrature weight for even profiles
    xi1 = np.sqrt(2.0 / length) * np.cos(k0 * grid.nodes)  # unit L2 norm

    p = eq.zero_degree
    fp = eq.flux_p_coeff
    c_corr = float(fp * quad * np.sum(xi1 ** (p + 1)))

    rhs = c_corr * xi1 - fp * xi1**p
    coeffs = forward(grid, rhs)
    # Mode 1 spans the kernel of (L - c0); its component is set to zero.
    denom_safe = denom.copy()
    denom_safe[1] = 1.0
    out = coeffs / denom_safe
    out[1] = 0.0
    xi_p = Wave.from_coefficients(grid, out)

    vanishes = p >= 4 and p % 2 == 0 and abs(c_corr) < _VANISH_TOL
    return StokesExpansion(
        wavenumber=k0,
        speed=c0,
        xi1=Wave(grid, xi1),
        order=p,
        speed_correction=c_corr,
        xi_p=xi_p,
        correction_vanishes=vanishes,
    )


def initial_guess(
    eq: Equation, grid: Grid, waveheight: float, order: str = "first"
) -> tuple[Wave, float]:
    """Starting profile and speed for a Newton solve near bifurcation.

    Args:
        order: "first" for the single-mode guess at speed c0,
            "corrected" to include the p-th order term and the speed
            correction.  A corrected guess whose speed correction
            vanishes identically (even p >= 4) falls back to first
            order.

    Returns:
        (wave, speed) pair.
    """
    if order not in ("first", "corrected"):
        raise ValueError(f"order must be 'first' or 'corrected', got {order!r}")
    c0 = bifurcation_speed(eq)
    if order == "first":
        return first_order_wave(grid, waveheight), c0
    exp = correction(eq, grid)
    if exp.correction_vanishes:
        return first_order_wave(grid, waveheight), c0
    xi1 = exp.xi1.samples
    span = xi1[0] - xi1[-1]
    eps = waveheight / span
    samples = eps * xi1 + eps**exp.order * exp.xi_p.samples
    speed = exp.speed + eps ** (exp.order - 1) * exp.speed_correction
    return Wave(grid, samples), float(speed)

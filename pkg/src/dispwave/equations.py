"""Model equations for nonlocal dispersive wave propagation.

Each equation pairs a nonlinear flux f(u) with the even, real symbol
alpha(k) of a Fourier multiplier operator L, so that the evolution
problem reads

    u_t + [f(u)]_x + L u_x = 0,

and a steady profile phi moving at speed c satisfies the integrated form

    -c phi + f(phi) + L phi = B

for some constant B.  The catalog below covers the classical KdV
normalization, its generalized-flux variant, the Whitham equation with
full water-wave dispersion, the Benjamin-Ono family, and the Benjamin
equation with a capillary correction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Equation",
    "NoExactSolution",
    "kdv",
    "gkdv",
    "whitham",
    "benjamin_ono",
    "modified_benjamin_ono",
    "benjamin",
    "make_equation",
    "catalog_names",
    "eval_symbol",
    "kdv_solitary",
    "exact_solution",
    "exact_waveheight_for_speed",
]


@dataclass(frozen=True)
class Equation:
    """A dispersive model equation.

    Attributes:
        name: catalog identifier, e.g. ``"whitham"``.
        length: fundamental wavelength of the computational period.
        symbol: even real dispersion symbol alpha(k); accepts scalars or
            numpy arrays.
        flux: nonlinearity f(u), vectorized.
        flux_prime: derivative f'(u).
        flux_antideriv: antiderivative F(u) with F' = f and F(0) = 0.
        zero_degree: smallest p with f^(p)(0) != 0 (p >= 2).
        flux_p_coeff: leading Taylor coefficient f^(p)(0)/p!.
        params: extra constructor parameters, kept for reporting.
    """

    name: str
    length: float
    symbol: Callable[[np.ndarray], np.ndarray]
    flux: Callable[[np.ndarray], np.ndarray]
    flux_prime: Callable[[np.ndarray], np.ndarray]
    flux_antideriv: Callable[[np.ndarray], np.ndarray]
    zero_degree: int
    flux_p_coeff: float
    params: tuple[tuple[str, float], ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.length > 0:
            raise ValueError(f"wavelength must be positive, got {self.length}")
        if self.zero_degree < 2:
            raise ValueError("flux must vanish to at least second order at 0")

    def label(self) -> str:
        """Human-readable identifier including parameters."""
        if not self.params:
            return self.name
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.name}({inner})"


class NoExactSolution(Exception):
    """Raised when a closed-form traveling wave is requested but unknown."""


def _kdv_symbol(k):
    return 1.0 - np.asarray(k) ** 2 / 6.0


def kdv(length: float) -> Equation:
    """KdV in the normalization u_t + u_x + (3/2) u u_x + (1/6) u_xxx = 0."""
    return Equation(
        name="kdv",
        length=length,
        symbol=_kdv_symbol,
        flux=lambda u: 0.75 * np.asarray(u) ** 2,
        flux_prime=lambda u: 1.5 * np.asarray(u),
        flux_antideriv=lambda u: 0.25 * np.asarray(u) ** 3,
        zero_degree=2,
        flux_p_coeff=0.75,
    )


def gkdv(length: float, p: int) -> Equation:
    """Generalized KdV with flux u^(p+1)/(p+1) and symbol 1 - k^2."""
    p = int(p)
    if p < 1:
        raise ValueError(f"nonlinearity exponent must be >= 1, got {p}")
    return Equation(
        name="gkdv",
        length=length,
        symbol=lambda k: 1.0 - np.asarray(k) ** 2,
        flux=lambda u: np.asarray(u) ** (p + 1) / (p + 1),
        flux_prime=lambda u: np.asarray(u) ** p,
        flux_antideriv=lambda u: np.asarray(u) ** (p + 2) / ((p + 1) * (p + 2)),
        zero_degree=p + 1,
        flux_p_coeff=1.0 / (p + 1),
        params=(("p", float(p)),),
    )


_WHITHAM_SMALL_K = 1e-4


def _whitham_symbol(k):
    """sqrt(tanh(k)/k), with the even Taylor branch 1 - k^2/6 near k = 0."""
    k = np.asarray(k, dtype=float)
    scalar = k.ndim == 0
    k = np.atleast_1d(k)
    small = np.abs(k) < _WHITHAM_SMALL_K
    # Avoid 0/0 in the masked lanes; the mask decides which branch is used.
    safe = np.where(small, 1.0, k)
    out = np.where(small, 1.0 - k**2 / 6.0, np.sqrt(np.tanh(safe) / safe))
    return out[0] if scalar else out


def whitham(length: float) -> Equation:
    """Whitham equation: KdV flux with the full unidirectional symbol."""
    return Equation(
        name="whitham",
        length=length,
        symbol=_whitham_symbol,
        flux=lambda u: 0.75 * np.asarray(u) ** 2,
        flux_prime=lambda u: 1.5 * np.asarray(u),
        flux_antideriv=lambda u: 0.25 * np.asarray(u) ** 3,
        zero_degree=2,
        flux_p_coeff=0.75,
    )


def benjamin_ono(length: float) -> Equation:
    """Benjamin-Ono: quadratic flux u^2/2 with symbol 1 - |k|."""
    return Equation(
        name="bo",
        length=length,
        symbol=lambda k: 1.0 - np.abs(k),
        flux=lambda u: 0.5 * np.asarray(u) ** 2,
        flux_prime=lambda u: np.asarray(u),
        flux_antideriv=lambda u: np.asarray(u) ** 3 / 6.0,
        zero_degree=2,
        flux_p_coeff=0.5,
    )


def modified_benjamin_ono(length: float) -> Equation:
    """Modified Benjamin-Ono: cubic flux u^3/3 with symbol 1 - |k|."""
    return Equation(
        name="mbo",
        length=length,
        symbol=lambda k: 1.0 - np.abs(k),
        flux=lambda u: np.asarray(u) ** 3 / 3.0,
        flux_prime=lambda u: np.asarray(u) ** 2,
        flux_antideriv=lambda u: np.asarray(u) ** 4 / 12.0,
        zero_degree=3,
        flux_p_coeff=1.0 / 3.0,
    )


def benjamin(length: float, tau: float) -> Equation:
    """Benjamin equation: quadratic flux with symbol 1 - |k| + tau k^2."""
    tau = float(tau)
    return Equation(
        name="benjamin",
        length=length,
        symbol=lambda k: 1.0 - np.abs(k) + tau * np.asarray(k) ** 2,
        flux=lambda u: 0.5 * np.asarray(u) ** 2,
        flux_prime=lambda u: np.asarray(u),
        flux_antideriv=lambda u: np.asarray(u) ** 3 / 6.0,
        zero_degree=2,
        flux_p_coeff=0.5,
        params=(("tau", tau),),
    )


_CATALOG: dict[str, Callable[..., Equation]] = {
    "kdv": kdv,
    "gkdv": gkdv,
    "whitham": whitham,
    "bo": benjamin_ono,
    "mbo": modified_benjamin_ono,
    "benjamin": benjamin,
}

# Constructor keyword arguments accepted beyond the wavelength.
_CATALOG_PARAMS: dict[str, tuple[str, ...]] = {
    "kdv": (),
    "gkdv": ("p",),
    "whitham": (),
    "bo": (),
    "mbo": (),
    "benjamin": ("tau",),
}


def catalog_names() -> tuple[str, ...]:
    return tuple(_CATALOG)


def make_equation(name: str, length: float, **params) -> Equation:
    """Build a catalog equation by name.

    Raises:
        KeyError: unknown equation name.
        TypeError: parameters that the named equation does not accept,
            or required parameters that are missing.
    """
    if name not in _CATALOG:
        raise KeyError(f"unknown equation {name!r}; choices: {sorted(_CATALOG)}")
    allowed = _CATALOG_PARAMS[name]
    extra = sorted(set(params) - set(allowed))
    if extra:
        raise TypeError(f"equation {name!r} does not accept parameters {extra}")
    missing = sorted(set(allowed) - set(params))
    if missing:
        raise TypeError(f"equation {name!r} requires parameters {missing}")
    return _CATALOG[name](length, **params)


def eval_symbol(eq: Equation, k) -> np.ndarray:
    """Evaluate the dispersion symbol at wavenumbers k."""
    return eq.symbol(k)


def kdv_solitary(waveheight: float) -> tuple[Callable[[np.ndarray], np.ndarray], float]:
    """Exact KdV solitary wave of height a, centered at x = 0.

    Returns the profile a*sech(sqrt(3a/4)*x)^2 and its speed 1 + a/2.
    """
    a = float(waveheight)
    if a <= 0:
        raise ValueError("waveheight must be positive")
    root = np.sqrt(0.75 * a)

    def profile(x):
        return a / np.cosh(root * np.asarray(x)) ** 2

    return profile, 1.0 + 0.5 * a


_EXACT_SOLUTIONS = {"kdv": kdv_solitary}

# inverse of the exact amplitude-speed relation, per family
_EXACT_SPEED_INVERSES = {"kdv": lambda c: 2.0 * (float(c) - 1.0)}


def exact_solution(eq: Equation, waveheight: float):
    """Closed-form traveling wave for equations that have one registered."""
    try:
        factory = _EXACT_SOLUTIONS[eq.name]
    except KeyError:
        raise NoExactSolution(
            f"no closed-form traveling wave registered for {eq.name!r}"
        ) from None
    return factory(waveheight)


def exact_waveheight_for_speed(eq: Equation, c: float) -> float:
    """Waveheight of the closed-form traveling wave with speed c.

    A discrete solution approximates the member of the exact family
    sharing its speed, so error studies should compare against that
    member rather than one matched by the grid-sampled waveheight.
    """
    try:
        inverse = _EXACT_SPEED_INVERSES[eq.name]
    except KeyError:
        raise NoExactSolution(
            f"no closed-form traveling wave registered for {eq.name!r}"
        ) from None
    height = inverse(c)
    if height <= 0:
        raise ValueError(f"speed {c:g} is outside the solitary range")
    return height

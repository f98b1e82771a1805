"""Half-period cosine collocation for even periodic profiles.

An even L-periodic profile is represented by its samples on the shifted
half-period grid

    x_n = (L/2) * (2n - 1) / (2N),    n = 1, ..., N,

and expanded in the orthonormal cosine basis with wavenumbers
kappa_l = 2*pi*l/L for l = 0, ..., N-1:

    Phi(kappa_l) = w(kappa_l) * sum_n phi(x_n) cos(kappa_l x_n),
    phi(x_n)     = sum_l w(kappa_l) Phi(kappa_l) cos(kappa_l x_n),

with weights w(kappa_0) = sqrt(1/N) and w(kappa_l) = sqrt(2/N) for
l > 0.  Since kappa_l * x_n = pi*l*(2n-1)/(2N), this pair coincides
exactly with the orthonormal DCT-II and its inverse, which is what the
fast paths below use.

A Fourier multiplier with even symbol alpha(k) acts diagonally in this
basis; its dense collocation matrix

    K[i, j] = sum_l w(kappa_l)^2 alpha(kappa_l) cos(kappa_l x_i) cos(kappa_l x_j)

is assembled only where a Jacobian is needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.fft import dct, idct

from .equations import Equation

__all__ = [
    "Grid",
    "Wave",
    "make_grid",
    "forward",
    "inverse",
    "series_eval",
    "apply_operator",
    "operator_matrix",
    "steady_residual",
    "refine",
]


def _frozen_array(values, n: int | None = None) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d array, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"expected length {n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("array contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid:
    """Immutable half-period collocation grid."""

    length: float
    n: int
    nodes: np.ndarray
    wavenumbers: np.ndarray
    weights: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self.length == other.length and self.n == other.n

    def __hash__(self) -> int:
        return hash((self.length, self.n))


def make_grid(length: float, n: int) -> Grid:
    """Build the shifted half-period grid for wavelength ``length``.

    Args:
        length: fundamental wavelength L, positive.
        n: number of collocation points, at least 4.
    """
    if not length > 0:
        raise ValueError(f"wavelength must be positive, got {length}")
    n = int(n)
    if n < 4:
        raise ValueError(f"grid needs at least 4 points, got {n}")
    idx = np.arange(1, n + 1)
    nodes = (length / 2.0) * (2.0 * idx - 1.0) / (2.0 * n)
    wavenumbers = 2.0 * np.pi * np.arange(n) / length
    weights = np.full(n, np.sqrt(2.0 / n))
    weights[0] = np.sqrt(1.0 / n)
    return Grid(
        length=float(length),
        n=n,
        nodes=_frozen_array(nodes, n),
        wavenumbers=_frozen_array(wavenumbers, n),
        weights=_frozen_array(weights, n),
    )


@dataclass(frozen=True, eq=False)
class Wave:
    """Half-period profile samples on a Grid.  Immutable value type."""

    grid: Grid
    samples: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", _frozen_array(self.samples, self.grid.n))

    @cached_property
    def coefficients(self) -> np.ndarray:
        return forward(self.grid, self.samples)

    @property
    def waveheight(self) -> float:
        """Crest-to-trough height phi(x_1) - phi(x_N)."""
        return float(self.samples[0] - self.samples[-1])

    def l2_norm(self) -> float:
        """L2 norm over the full period of the even extension."""
        w = self.grid.length / self.grid.n
        return float(np.sqrt(w * np.sum(self.samples**2)))

    @staticmethod
    def from_samples(grid: Grid, samples) -> "Wave":
        return Wave(grid, np.asarray(samples, dtype=float))

    @staticmethod
    def from_coefficients(grid: Grid, coefficients) -> "Wave":
        coefficients = np.asarray(coefficients, dtype=float)
        return Wave(grid, inverse(grid, coefficients))


def forward(grid: Grid, samples: np.ndarray) -> np.ndarray:
    """Samples on the grid -> orthonormal cosine coefficients."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} samples, got shape {samples.shape}")
    return dct(samples, type=2, norm="ortho")


def inverse(grid: Grid, coefficients: np.ndarray) -> np.ndarray:
    """Orthonormal cosine coefficients -> samples on the grid."""
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape != (grid.n,):
        raise ValueError(
            f"expected {grid.n} coefficients, got shape {coefficients.shape}"
        )
    return idct(coefficients, type=2, norm="ortho")


def series_eval(wave: Wave, x) -> np.ndarray:
    """Evaluate the cosine series of ``wave`` at arbitrary points.

    This is the even L-periodic interpolant; useful for grid transfer
    and for mirroring onto full-period grids.
    """
    grid = wave.grid
    x = np.atleast_1d(np.asarray(x, dtype=float))
    scaled = wave.grid.weights * wave.coefficients
    # sum_l w_l Phi_l cos(kappa_l x); modest sizes, dense evaluation.
    out = np.cos(np.outer(x, grid.wavenumbers)) @ scaled
    return out


def apply_operator(eq: Equation, wave: Wave) -> Wave:
    """Apply the Fourier multiplier with symbol alpha to a wave."""
    grid = wave.grid
    alpha = np.asarray(eq.symbol(grid.wavenumbers), dtype=float)
    return Wave(grid, inverse(grid, alpha * wave.coefficients))


# Dense multiplier matrices are reused across Newton iterations and
# continuation steps; key on the symbol values so equal grids share.
_MATRIX_CACHE: dict[tuple, np.ndarray] = {}
_MATRIX_CACHE_MAX = 8


def operator_matrix(eq: Equation, grid: Grid) -> np.ndarray:
    """Dense collocation matrix of the multiplier operator on ``grid``.

    The matrix is symmetric; it is cached keyed on the symbol samples,
    so repeated Jacobian assemblies on one grid reuse it.
    """
    alpha = np.asarray(eq.symbol(grid.wavenumbers), dtype=float)
    key = (grid.n, grid.length, alpha.tobytes())
    hit = _MATRIX_CACHE.get(key)
    if hit is not None:
        return hit
    # Columns of D are the forward transforms of the unit vectors:
    # D[l, j] = w_l cos(kappa_l x_j).
    basis = dct(np.eye(grid.n), type=2, norm="ortho", axis=0)
    matrix = basis.T @ (alpha[:, None] * basis)
    matrix = 0.5 * (matrix + matrix.T)
    matrix.setflags(write=False)
    if len(_MATRIX_CACHE) >= _MATRIX_CACHE_MAX:
        _MATRIX_CACHE.pop(next(iter(_MATRIX_CACHE)))
    _MATRIX_CACHE[key] = matrix
    return matrix


def steady_residual(eq: Equation, wave: Wave, c: float, b: float) -> np.ndarray:
    """Residual of -c*phi + f(phi) + L*phi - B at the collocation nodes."""
    lphi = apply_operator(eq, wave).samples
    return -c * wave.samples + eq.flux(wave.samples) + lphi - b


def refine(wave: Wave, factor: int) -> Wave:
    """Interpolate a wave onto a grid ``factor`` times finer.

    The cosine series is zero-padded; ``factor`` must be a power of two
    and at least 2.  The samples on the finer grid interpolate the same
    even periodic function.
    """
    factor = int(factor)
    if factor < 2 or factor & (factor - 1):
        raise ValueError(f"refinement factor must be a power of two >= 2, got {factor}")
    grid = wave.grid
    fine = make_grid(grid.length, grid.n * factor)
    coeffs = np.zeros(fine.n)
    # Orthonormal weights scale with the grid size, hence sqrt(factor).
    coeffs[: grid.n] = wave.coefficients * np.sqrt(factor)
    return Wave.from_coefficients(fine, coeffs)

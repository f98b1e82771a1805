"""Extended Newton solver for steady traveling-wave profiles.

The unknowns are the N profile samples, the integration constant B, and
a scalar theta that slides the pair (speed, waveheight) along a fixed
line through the continuation anchor:

    (c, a)(theta) = (c3, a3) + theta * dperp.

Rows 1..N impose the integrated steady equation, row N+1 the boundary
condition Omega, and row N+2 pins the waveheight phi(x_1) - phi(x_N)
to a(theta).  The square (N+2) system is solved by a dense LU with an
explicit singularity guard.
"""
from __future__ import annotations

from dataclasses import dataclass

import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lapack, lu_factor, lu_solve

from .equations import Equation
from .spectral import Grid, Wave, operator_matrix

__all__ = [
    "SolverError",
    "NoConvergence",
    "SingularJacobian",
    "BoundaryCondition",
    "MeanZero",
    "HomogeneousB",
    "Solitary",
    "ConstLevel",
    "ContinuationFrame",
    "NewtonOptions",
    "SolutionPoint",
    "extended_residual",
    "jacobian",
    "newton_solve",
]

# Singularity guards for the dense LU.
_RCOND_MIN = 1e-14
_PIVOT_MIN = 1e-14


class SolverError(Exception):
    """Base class for solver failures."""


class NoConvergence(SolverError):
    """Newton iteration did not reach the tolerance.

    Carries the last iterate so callers can inspect or retry.
    """

    def __init__(self, residual_norm, iterations, samples=None, b=None, theta=None):
        super().__init__(
            f"no convergence after {iterations} iterations, "
            f"residual {residual_norm:.3e}"
        )
        self.residual_norm = residual_norm
        self.iterations = iterations
        self.samples = samples
        self.b = b
        self.theta = theta


class SingularJacobian(SolverError):
    """The extended Jacobian is numerically singular."""

    def __init__(self, rcond):
        super().__init__(f"extended Jacobian is numerically singular (rcond={rcond:.3e})")
        self.rcond = rcond


class BoundaryCondition:
    """Scalar side condition Omega(phi, c, a, B) = 0 closing the system."""

    def value(self, samples: np.ndarray, c: float, a: float, b: float) -> float:
        raise NotImplementedError

    def gradient(self, samples: np.ndarray, c: float, a: float, b: float):
        """Partial derivatives (d/dphi vector, d/dB, d/dc, d/da)."""
        raise NotImplementedError


@dataclass(frozen=True)
class MeanZero(BoundaryCondition):
    """Pin the discrete mean: sum of the samples vanishes."""

    def value(self, samples, c, a, b):
        return float(np.sum(samples))

    def gradient(self, samples, c, a, b):
        return np.ones_like(samples), 0.0, 0.0, 0.0


@dataclass(frozen=True)
class HomogeneousB(BoundaryCondition):
    """Force the integration constant B to vanish."""

    def value(self, samples, c, a, b):
        return float(b)

    def gradient(self, samples, c, a, b):
        return np.zeros_like(samples), 1.0, 0.0, 0.0


@dataclass(frozen=True)
class Solitary(BoundaryCondition):
    """Pin the trough sample to zero, mimicking decay at infinity."""

    def value(self, samples, c, a, b):
        return float(samples[-1])

    def gradient(self, samples, c, a, b):
        row = np.zeros_like(samples)
        row[-1] = 1.0
        return row, 0.0, 0.0, 0.0


@dataclass(frozen=True)
class ConstLevel(BoundaryCondition):
    """Hold the integration constant at a prescribed level."""

    level: float = 0.0

    def value(self, samples, c, a, b):
        return float(b - self.level)

    def gradient(self, samples, c, a, b):
        return np.zeros_like(samples), 1.0, 0.0, 0.0


@dataclass(frozen=True)
class ContinuationFrame:
    """Anchor point and search line for the extended system."""

    anchor_c: float
    anchor_a: float
    dperp_c: float
    dperp_a: float

    def speed_amplitude(self, theta: float) -> tuple[float, float]:
        return (
            self.anchor_c + theta * self.dperp_c,
            self.anchor_a + theta * self.dperp_a,
        )

    @staticmethod
    def anchored(c: float, a: float, dperp=(1.0, 0.0)) -> "ContinuationFrame":
        """Frame holding the waveheight fixed while the speed floats."""
        return ContinuationFrame(c, a, dperp[0], dperp[1])


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-12
    max_iters: int = 50


@dataclass(frozen=True, eq=False)
class SolutionPoint:
    """A converged point of the extended system."""

    wave: Wave
    c: float
    a: float
    b: float
    theta: float
    residual_norm: float
    newton_iters: int
    residual_history: tuple[float, ...] = ()
    frame: ContinuationFrame | None = None


def _residual(eq, bc, frame, matrix, samples, b, theta):
    c, a = frame.speed_amplitude(theta)
    res = np.empty(samples.size + 2)
    res[:-2] = -c * samples + eq.flux(samples) + matrix @ samples - b
    res[-2] = bc.value(samples, c, a, b)
    res[-1] = samples[0] - samples[-1] - a
    return res


def extended_residual(
    eq: Equation,
    bc: BoundaryCondition,
    frame: ContinuationFrame,
    wave: Wave,
    b: float,
    theta: float,
) -> np.ndarray:
    """Residual of the (N+2)-row extended system."""
    matrix = operator_matrix(eq, wave.grid)
    return _residual(eq, bc, frame, matrix, wave.samples, b, theta)


def _jacobian(eq, bc, frame, matrix, samples, b, theta):
    n = samples.size
    c, a = frame.speed_amplitude(theta)
    jac = np.zeros((n + 2, n + 2))
    jac[:n, :n] = matrix
    diag = np.arange(n)
    jac[diag, diag] += eq.flux_prime(samples) - c
    jac[:n, n] = -1.0
    # theta enters rows 1..N only through c(theta).
    jac[:n, n + 1] = -frame.dperp_c * samples
    dphi, db, dc, da = bc.gradient(samples, c, a, b)
    jac[n, :n] = dphi
    jac[n, n] = db
    jac[n, n + 1] = dc * frame.dperp_c + da * frame.dperp_a
    jac[n + 1, 0] += 1.0
    jac[n + 1, n - 1] += -1.0
    jac[n + 1, n + 1] = -frame.dperp_a
    return jac


def jacobian(
    eq: Equation,
    bc: BoundaryCondition,
    frame: ContinuationFrame,
    wave: Wave,
    b: float,
    theta: float,
) -> np.ndarray:
    """Dense Jacobian of the extended system at the given state."""
    matrix = operator_matrix(eq, wave.grid)
    return _jacobian(eq, bc, frame, matrix, wave.samples, b, theta)


def _factor_checked(jac):
    # scipy warns on exact singularity; the pivot/rcond guards below
    # turn that condition into a typed exception instead.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(jac, check_finite=False)
    pivots = np.abs(np.diag(lu))
    anorm = np.abs(jac).sum(axis=0).max()
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or not np.isfinite(rcond):
        raise SingularJacobian(0.0)
    if rcond < _RCOND_MIN or pivots.min() < _PIVOT_MIN:
        raise SingularJacobian(rcond)
    return lu, piv


def newton_solve(
    eq: Equation,
    bc: BoundaryCondition,
    frame: ContinuationFrame,
    wave: Wave,
    b: float = 0.0,
    theta: float = 0.0,
    options: NewtonOptions | None = None,
) -> SolutionPoint:
    """Solve the extended system by a full Newton iteration.

    Convergence is measured on the max norm of the extended residual.
    A converged input returns immediately with zero iterations.

    Raises:
        NoConvergence: tolerance not met within the iteration budget, or
            the iteration produced non-finite values.
        SingularJacobian: LU condition estimate above 1e14 or a pivot
            below 1e-14 in magnitude.
    """
    opts = options or NewtonOptions()
    grid = wave.grid
    matrix = operator_matrix(eq, grid)
    samples = wave.samples.copy()
    theta = float(theta)
    b = float(b)

    res = _residual(eq, bc, frame, matrix, samples, b, theta)
    norm = float(np.abs(res).max())
    history = [norm]

    iters = 0
    # "not <=" rather than ">" so a NaN residual stays in the loop and
    # trips the finiteness guard instead of passing as converged.
    while not norm <= opts.tol:
        if iters >= opts.max_iters or not np.isfinite(norm):
            raise NoConvergence(norm, iters, samples, b, theta)
        jac = _jacobian(eq, bc, frame, matrix, samples, b, theta)
        lu_piv = _factor_checked(jac)
        delta = lu_solve(lu_piv, -res, check_finite=False)
        samples = samples + delta[:-2]
        b += float(delta[-2])
        theta += float(delta[-1])
        res = _residual(eq, bc, frame, matrix, samples, b, theta)
        norm = float(np.abs(res).max())
        history.append(norm)
        iters += 1

    c, a = frame.speed_amplitude(theta)
    return SolutionPoint(
        wave=Wave(grid, samples),
        c=float(c),
        a=float(a),
        b=b,
        theta=theta,
        residual_norm=norm,
        newton_iters=iters,
        residual_history=tuple(history),
        frame=frame,
    )

"""Branch navigation by secant prediction and orthogonal correction.

The branch lives in the (speed, waveheight) plane.  Each step takes the
two latest points P1, P2, forms the unit secant direction d, predicts
P3 = P2 + s*d, and lets the Newton solver correct along the orthogonal
line through P3; the corrected point is P3 + theta*dperp with dperp the
left-hand normal of d.  Failed corrections halve the step; runs of easy
successes restore it toward the configured value.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import stokes
from .equations import Equation
from .solver import (
    BoundaryCondition,
    ConstLevel,
    ContinuationFrame,
    NewtonOptions,
    NoConvergence,
    SingularJacobian,
    SolutionPoint,
    SolverError,
    newton_solve,
)
from .spectral import Grid, Wave, refine

__all__ = [
    "BranchTerminated",
    "NavigationOptions",
    "Branch",
    "direction",
    "predict",
    "orthogonal",
    "bootstrap",
    "step",
    "extend",
    "refine_branch",
    "solve_at_waveheight",
]


class BranchTerminated(Exception):
    """Navigation cannot proceed; carries a machine-readable reason."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"branch terminated: {reason}" + (f" ({detail})" if detail else ""))
        self.reason = reason
        self.detail = detail


@dataclass(frozen=True)
class NavigationOptions:
    """Step-control parameters for branch navigation."""

    step: float = 0.01
    max_halvings: int = 6
    easy_iters: int = 4
    easy_successes: int = 3
    newton: NewtonOptions = field(default_factory=NewtonOptions)


@dataclass(eq=False)
class Branch:
    """An ordered run of solution points on one grid.

    ``steps`` records the step size actually used to reach each point
    (zero for the two bootstrap points).  ``termination`` is None while
    the branch is extendable, otherwise one of "max-steps",
    "no-convergence", "singular-jacobian".  ``failed`` maps point
    indices to failure reasons left behind by grid refinement.
    """

    equation: Equation
    boundary: BoundaryCondition
    points: list[SolutionPoint]
    steps: list[float]
    current_step: float
    easy_streak: int = 0
    termination: str | None = None
    failed: dict[int, str] = field(default_factory=dict)

    @property
    def grid(self) -> Grid:
        return self.points[-1].wave.grid

    def speeds(self) -> np.ndarray:
        return np.array([p.c for p in self.points])

    def waveheights(self) -> np.ndarray:
        return np.array([p.a for p in self.points])


def direction(p1: tuple[float, float], p2: tuple[float, float]) -> tuple[float, float]:
    """Unit secant direction from P1 to P2 in the (c, a) plane."""
    dc = p2[0] - p1[0]
    da = p2[1] - p1[1]
    norm = float(np.hypot(dc, da))
    if norm == 0.0:
        raise ValueError("cannot take a direction between coincident points")
    return dc / norm, da / norm


def predict(p2: tuple[float, float], d: tuple[float, float], s: float) -> tuple[float, float]:
    """Secant predictor P3 = P2 + s*d."""
    return p2[0] + s * d[0], p2[1] + s * d[1]


def orthogonal(d: tuple[float, float]) -> tuple[float, float]:
    """Left-hand unit normal (-d_a, d_c) of a unit direction."""
    return -d[1], d[0]


def bootstrap(
    eq: Equation,
    bc: BoundaryCondition,
    grid: Grid,
    waveheight: float = 1e-3,
    options: NavigationOptions | None = None,
    guess: str = "stokes:first",
) -> Branch:
    """Start a branch from the bifurcation point.

    The first point is the exact zero wave at the bifurcation speed
    c0 = alpha(2*pi/L).  The second is a Newton solve at the given small
    waveheight, with the waveheight pinned and the speed free, started
    from the requested small-amplitude guess ("stokes:first" or
    "stokes:corrected"; bare "first"/"corrected" are accepted too).
    """
    opts = options or NavigationOptions()
    if isinstance(bc, ConstLevel) and bc.level != 0.0:
        raise ValueError(
            "bootstrap needs the zero wave to solve the system; "
            "a nonzero constant level excludes it"
        )
    order = guess.removeprefix("stokes:")
    if order not in ("first", "corrected"):
        raise ValueError(f"unknown guess kind {guess!r}")
    if not waveheight > 0:
        raise ValueError("starting waveheight must be positive")

    c0 = stokes.bifurcation_speed(eq)
    zero = Wave(grid, np.zeros(grid.n))
    trivial = SolutionPoint(
        wave=zero, c=c0, a=0.0, b=0.0, theta=0.0,
        residual_norm=0.0, newton_iters=0, residual_history=(0.0,),
    )

    wave0, c_guess = stokes.initial_guess(eq, grid, waveheight, order)
    frame = ContinuationFrame(c0, waveheight, 1.0, 0.0)
    first = newton_solve(
        eq, bc, frame, wave0, b=0.0, theta=c_guess - c0, options=opts.newton
    )
    # A first step far beyond the bootstrap spacing would throw the
    # predictor outside the Newton basin of the bifurcating family and
    # risk capture by a neighboring branch, so start commensurate with
    # the spacing and let the easy-success rule grow the step back.
    spacing = float(np.hypot(first.c - c0, first.a))
    return Branch(
        equation=eq,
        boundary=bc,
        points=[trivial, first],
        steps=[0.0, 0.0],
        current_step=min(opts.step, 5.0 * spacing),
    )


def _rescaled(wave: Wave, current: float, target: float) -> Wave:
    # Shape-preserving guess: scale the previous profile to the predicted
    # waveheight.
    if abs(current) < 1e-300:
        return wave
    return Wave(wave.grid, wave.samples * (target / current))


def step(branch: Branch, options: NavigationOptions | None = None) -> SolutionPoint:
    """Advance the branch by one predictor/corrector step.

    Appends the converged point and returns it.  The step size is halved
    on failure, up to ``max_halvings`` times; after ``easy_successes``
    consecutive quick solves a previously reduced step is doubled back,
    never beyond the configured value.

    Raises:
        BranchTerminated: every retry failed ("no-convergence") or the
            Jacobian stayed singular at the smallest step
            ("singular-jacobian").
    """
    opts = options or NavigationOptions()
    if len(branch.points) < 2:
        raise ValueError("branch needs two points before stepping")
    prev, last = branch.points[-2], branch.points[-1]
    d = direction((prev.c, prev.a), (last.c, last.a))
    dperp = orthogonal(d)

    s = branch.current_step
    last_error: SolverError | None = None
    for _ in range(opts.max_halvings + 1):
        target_c, target_a = predict((last.c, last.a), d, s)
        frame = ContinuationFrame(target_c, target_a, dperp[0], dperp[1])
        wave0 = _rescaled(last.wave, last.a, target_a)
        try:
            point = newton_solve(
                branch.equation, branch.boundary, frame, wave0,
                b=last.b, theta=0.0, options=opts.newton,
            )
        except (NoConvergence, SingularJacobian) as err:
            last_error = err
            s *= 0.5
            continue
        branch.points.append(point)
        branch.steps.append(s)
        branch.current_step = s
        if point.newton_iters <= opts.easy_iters:
            branch.easy_streak += 1
        else:
            branch.easy_streak = 0
        if branch.easy_streak >= opts.easy_successes and branch.current_step < opts.step:
            branch.current_step = min(2.0 * branch.current_step, opts.step)
            branch.easy_streak = 0
        return point

    if isinstance(last_error, SingularJacobian):
        raise BranchTerminated("singular-jacobian", str(last_error))
    raise BranchTerminated("no-convergence", str(last_error))


def extend(branch: Branch, n_steps: int, options: NavigationOptions | None = None) -> Branch:
    """Drive the branch forward up to ``n_steps`` points.

    Sets ``branch.termination`` to "max-steps" on normal exhaustion or
    to the terminating reason if navigation stopped early.
    """
    for _ in range(n_steps):
        try:
            step(branch, options)
        except BranchTerminated as stop:
            branch.termination = stop.reason
            return branch
    branch.termination = "max-steps"
    return branch


def refine_branch(
    branch: Branch, doublings: int, options: NavigationOptions | None = None
) -> list[Branch]:
    """Re-solve every branch point on successively doubled grids.

    Each stage interpolates the profiles onto a grid twice as fine and
    re-solves with the waveheight held fixed and the speed free.  Points
    that fail to converge keep their coarser representation and are
    recorded in the stage's ``failed`` map instead of being dropped.

    Returns the list of stages, coarsest first; the last entry is the
    finest branch.
    """
    opts = options or NavigationOptions()
    if doublings < 0:
        raise ValueError("doublings must be nonnegative")
    stages: list[Branch] = []
    current = branch
    for _ in range(doublings):
        points: list[SolutionPoint] = []
        failed: dict[int, str] = {}
        for i, pt in enumerate(current.points):
            fine_wave = refine(pt.wave, 2)
            frame = ContinuationFrame.anchored(pt.c, pt.a)
            try:
                new_pt = newton_solve(
                    branch.equation, branch.boundary, frame, fine_wave,
                    b=pt.b, theta=0.0, options=opts.newton,
                )
            except SolverError as err:
                failed[i] = f"{type(err).__name__}: {err}"
                new_pt = pt
            points.append(new_pt)
        current = Branch(
            equation=branch.equation,
            boundary=branch.boundary,
            points=points,
            steps=list(current.steps),
            current_step=current.current_step,
            termination=current.termination,
            failed=failed,
        )
        stages.append(current)
    return stages


def solve_at_waveheight(
    eq: Equation,
    bc: BoundaryCondition,
    grid: Grid,
    waveheight: float,
    options: NavigationOptions | None = None,
    guess: str = "stokes:first",
    max_steps: int = 2000,
) -> SolutionPoint:
    """Compute the branch point with exactly the requested waveheight.

    Marches a fresh branch from the bifurcation point until the target
    waveheight is bracketed, then re-solves with the waveheight pinned
    and the speed free.  Raises BranchTerminated if navigation stops
    before the target is reached.
    """
    if not waveheight > 0:
        raise ValueError("waveheight must be positive")
    opts = options or NavigationOptions()
    start = min(1e-3, 0.5 * waveheight)
    branch = bootstrap(eq, bc, grid, waveheight=start, options=opts, guess=guess)
    for _ in range(max_steps):
        if branch.points[-1].a >= waveheight:
            break
        step(branch, opts)
    else:
        raise BranchTerminated(
            "max-steps", f"waveheight {waveheight:g} not reached in {max_steps} steps"
        )
    last = branch.points[-1]
    frame = ContinuationFrame.anchored(last.c, waveheight)
    return newton_solve(
        eq, bc, frame,
        _rescaled(last.wave, last.a, waveheight),
        b=last.b, theta=0.0, options=opts.newton,
    )

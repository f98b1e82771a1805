"""Run configuration: strict INI schema with typed validation.

Unknown sections or keys are hard errors naming the offending entry,
so a misspelled key can never silently fall back to a default.
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

from .equations import Equation, catalog_names, make_equation
from .solver import (
    BoundaryCondition,
    ConstLevel,
    HomogeneousB,
    MeanZero,
    NewtonOptions,
    Solitary,
)

__all__ = ["ConfigError", "EvolutionConfig", "RunConfig", "load_config", "parse_config"]

_SCHEMA: dict[str, tuple[str, ...]] = {
    "equation": ("name", "length", "tau", "p"),
    "grid": ("n", "doubling"),
    "boundary": ("kind", "level"),
    "navigation": ("step", "n_iter", "max_halvings", "amplitude_start", "guess"),
    "newton": ("newton_tol", "newton_max_iters"),
    "evolution": ("dt", "t_end", "dealias", "snapshot_stride", "profile"),
    "convergence": ("grids", "waveheight"),
    "analyze": ("branch_dir",),
    "output": ("directory",),
}

_BOUNDARY_KINDS = ("mean-zero", "homogeneous", "solitary", "const-level")
_GUESSES = ("stokes:first", "stokes:corrected")


class ConfigError(Exception):
    """Invalid, unknown, or ill-typed configuration entry."""


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float | None = None
    t_end: float = 1.0
    dealias: bool = True
    snapshot_stride: int = 1
    profile: str = ""


@dataclass(frozen=True)
class RunConfig:
    equation: Equation
    grid_n: int = 64
    doubling: int = 3
    boundary_kind: str = "mean-zero"
    boundary_level: float = 0.0
    step: float = 0.01
    n_iter: int = 100
    max_halvings: int = 6
    amplitude_start: float = 1e-3
    guess: str = "stokes:first"
    newton: NewtonOptions = field(default_factory=NewtonOptions)
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    grids: tuple[int, ...] = (32, 64, 128, 256, 512)
    waveheight: float = 0.5
    branch_dir: str = ""
    output_dir: str = "out"
    raw: dict[str, dict[str, str]] = field(default_factory=dict)

    def make_boundary(self) -> BoundaryCondition:
        if self.boundary_kind == "mean-zero":
            return MeanZero()
        if self.boundary_kind == "homogeneous":
            return HomogeneousB()
        if self.boundary_kind == "solitary":
            return Solitary()
        return ConstLevel(self.boundary_level)


class _Section:
    """Typed accessors for one section with key-precise error messages."""

    def __init__(self, name: str, values: dict[str, str]):
        self.name = name
        self.values = values

    def _convert(self, key: str, kind, default):
        if key not in self.values:
            return default
        raw = self.values[key]
        try:
            if kind is bool:
                lowered = raw.strip().lower()
                if lowered in ("1", "true", "yes", "on"):
                    return True
                if lowered in ("0", "false", "no", "off"):
                    return False
                raise ValueError(raw)
            return kind(raw)
        except ValueError:
            raise ConfigError(
                f"key '{key}' in section [{self.name}]: cannot parse {raw!r} as {kind.__name__}"
            ) from None

    def get_float(self, key: str, default=None) -> float | None:
        return self._convert(key, float, default)

    def get_int(self, key: str, default=None) -> int | None:
        return self._convert(key, int, default)

    def get_bool(self, key: str, default=None) -> bool | None:
        return self._convert(key, bool, default)

    def get_str(self, key: str, default=None) -> str | None:
        return self._convert(key, str, default)

    def require(self, key: str, kind):
        if key not in self.values:
            raise ConfigError(f"missing required key '{key}' in section [{self.name}]")
        return self._convert(key, kind, None)

    def forbid(self, key: str, reason: str) -> None:
        if key in self.values:
            raise ConfigError(f"key '{key}' in section [{self.name}] {reason}")

    def check(self, cond: bool, key: str, message: str) -> None:
        if not cond:
            raise ConfigError(f"key '{key}' in section [{self.name}]: {message}")


def _validate_names(sections: dict[str, dict[str, str]]) -> None:
    for sec, keys in sections.items():
        if sec not in _SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        for key in keys:
            if key not in _SCHEMA[sec]:
                raise ConfigError(f"unknown key '{key}' in section [{sec}]")


def apply_overrides(sections: dict[str, dict[str, str]], overrides: list[str]) -> None:
    """Fold ``section.key=value`` strings into the parsed sections."""
    for item in overrides:
        head, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        sec, dot, key = head.partition(".")
        if not dot or not sec or not key:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        sections.setdefault(sec.strip(), {})[key.strip()] = value.strip()


def parse_config(text: str, overrides: list[str] | None = None) -> RunConfig:
    """Parse INI text into a validated run configuration."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    sections: dict[str, dict[str, str]] = {
        sec: dict(parser.items(sec)) for sec in parser.sections()
    }
    if overrides:
        apply_overrides(sections, overrides)
    _validate_names(sections)

    eq_sec = _Section("equation", sections.get("equation", {}))
    if not eq_sec.values:
        raise ConfigError("missing required section [equation]")
    name = eq_sec.require("name", str)
    if name not in catalog_names():
        raise ConfigError(
            f"key 'name' in section [equation]: unknown equation {name!r}; "
            f"choices are {', '.join(catalog_names())}"
        )
    length = eq_sec.require("length", float)
    eq_sec.check(length > 0, "length", "must be positive")
    params = {}
    if name == "benjamin":
        params["tau"] = eq_sec.require("tau", float)
        eq_sec.check(params["tau"] > 0, "tau", "must be positive")
    else:
        eq_sec.forbid("tau", "only applies to the benjamin equation")
    if name == "gkdv":
        params["p"] = eq_sec.require("p", int)
        eq_sec.check(params["p"] >= 1, "p", "must be a positive integer")
    else:
        eq_sec.forbid("p", "only applies to the gkdv equation")
    equation = make_equation(name, length, **params)

    grid_sec = _Section("grid", sections.get("grid", {}))
    grid_n = grid_sec.get_int("n", 64)
    grid_sec.check(grid_n >= 4, "n", "must be at least 4")
    doubling = grid_sec.get_int("doubling", 3)
    grid_sec.check(doubling >= 0, "doubling", "must be nonnegative")

    bc_sec = _Section("boundary", sections.get("boundary", {}))
    kind = bc_sec.get_str("kind", "mean-zero")
    bc_sec.check(
        kind in _BOUNDARY_KINDS,
        "kind",
        f"must be one of {', '.join(_BOUNDARY_KINDS)}",
    )
    if kind != "const-level":
        bc_sec.forbid("level", "only applies to the const-level boundary")
    level = bc_sec.get_float("level", 0.0)

    nav_sec = _Section("navigation", sections.get("navigation", {}))
    step = nav_sec.get_float("step", 0.01)
    nav_sec.check(step > 0, "step", "must be positive")
    n_iter = nav_sec.get_int("n_iter", 100)
    nav_sec.check(n_iter >= 1, "n_iter", "must be at least 1")
    max_halvings = nav_sec.get_int("max_halvings", 6)
    nav_sec.check(max_halvings >= 0, "max_halvings", "must be nonnegative")
    amplitude_start = nav_sec.get_float("amplitude_start", 1e-3)
    nav_sec.check(amplitude_start > 0, "amplitude_start", "must be positive")
    guess = nav_sec.get_str("guess", "stokes:first")
    nav_sec.check(guess in _GUESSES, "guess", f"must be one of {', '.join(_GUESSES)}")

    newton_sec = _Section("newton", sections.get("newton", {}))
    newton_tol = newton_sec.get_float("newton_tol", 1e-12)
    newton_sec.check(newton_tol > 0, "newton_tol", "must be positive")
    newton_max = newton_sec.get_int("newton_max_iters", 50)
    newton_sec.check(newton_max >= 1, "newton_max_iters", "must be at least 1")

    evo_sec = _Section("evolution", sections.get("evolution", {}))
    dt = evo_sec.get_float("dt", None)
    if dt is not None:
        evo_sec.check(dt > 0, "dt", "must be positive")
    t_end = evo_sec.get_float("t_end", 1.0)
    evo_sec.check(t_end > 0, "t_end", "must be positive")
    dealias = evo_sec.get_bool("dealias", True)
    stride = evo_sec.get_int("snapshot_stride", 1)
    evo_sec.check(stride >= 1, "snapshot_stride", "must be at least 1")
    profile = evo_sec.get_str("profile", "")

    conv_sec = _Section("convergence", sections.get("convergence", {}))
    grids_raw = conv_sec.get_str("grids", "32,64,128,256,512")
    try:
        grids = tuple(int(tok) for tok in grids_raw.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(
            f"key 'grids' in section [convergence]: cannot parse {grids_raw!r} "
            "as a comma-separated list of integers"
        ) from None
    conv_sec.check(len(grids) >= 2, "grids", "need at least two grid sizes")
    conv_sec.check(all(g >= 4 for g in grids), "grids", "every size must be at least 4")
    waveheight = conv_sec.get_float("waveheight", 0.5)
    conv_sec.check(waveheight > 0, "waveheight", "must be positive")

    ana_sec = _Section("analyze", sections.get("analyze", {}))
    branch_dir = ana_sec.get_str("branch_dir", "")

    out_sec = _Section("output", sections.get("output", {}))
    output_dir = out_sec.get_str("directory", "out")

    return RunConfig(
        equation=equation,
        grid_n=grid_n,
        doubling=doubling,
        boundary_kind=kind,
        boundary_level=level,
        step=step,
        n_iter=n_iter,
        max_halvings=max_halvings,
        amplitude_start=amplitude_start,
        guess=guess,
        newton=NewtonOptions(tol=newton_tol, max_iters=newton_max),
        evolution=EvolutionConfig(
            dt=dt, t_end=t_end, dealias=dealias, snapshot_stride=stride, profile=profile
        ),
        grids=grids,
        waveheight=waveheight,
        branch_dir=branch_dir,
        output_dir=output_dir,
        raw=sections,
    )


def load_config(path: str, overrides: list[str] | None = None) -> RunConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read(), overrides)

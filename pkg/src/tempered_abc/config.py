"""Experiment configuration files.

Grammar (one setting per line)::

    file    := { line }
    line    := blank | comment | setting
    comment := "#" text
    setting := key "=" value [ "#" text ]

Keys are case-sensitive and may appear at most once. Lists (``s0``) are
comma-separated. Relative ``ic_table`` paths are resolved against the
directory of the config file.

Required keys: ``kappa``, ``lambda``, ``gamma``, ``x_left``, ``x_right``,
``n_cells``, ``t_final``, ``n_steps``, ``experiment``. Everything else has
the default listed in :data:`DEFAULTS`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .calculus import TimeGrid
from .errors import ConfigError, InvalidInputError
from .io import read_table
from .solver import GridSpec, InitialCondition, ModelParams

EXPERIMENTS = ("abc-vs-oracle", "convergence", "energy", "transform-identities", "parseval-spotcheck")
IC_KINDS = ("gaussian", "sine", "table")
BOUNDARIES = ("abc", "dirichlet")
SCHEMES = ("caputo", "rl")

REQUIRED = ("kappa", "lambda", "gamma", "x_left", "x_right", "n_cells", "t_final", "n_steps", "experiment")
DEFAULTS = {
    "ic": "gaussian",
    "ic_center": "0.0",
    "ic_width": "0.2",
    "ic_mu": "1.0",
    "ic_table": "",
    "scheme": "caputo",
    "boundary": "abc",
    "padding": "8.0",
    "s0": "0.5, 1.0, 2.0, 4.0",
    "levels": "3",
    "tolerance": "1e-3",
    "output_dir": "output",
}
KEYS = REQUIRED + tuple(DEFAULTS)


@dataclass(frozen=True)
class InitialSpec:
    """Initial profile description.

    ``gaussian``: ``exp(-((x - center) / width)^2)``; ``sine``: ``sin(mu x)``;
    ``table``: linear interpolation of a two-column ``x value`` file, zero
    outside its range.
    """

    kind: str
    center: float = 0.0
    width: float = 0.2
    mu: float = 1.0
    table: str = ""

    def build(self) -> InitialCondition:
        if self.kind == "gaussian":
            c, w = self.center, self.width
            return InitialCondition(lambda x: np.exp(-(((x - c) / w) ** 2)))
        if self.kind == "sine":
            mu = self.mu
            return InitialCondition(lambda x: np.sin(mu * x))
        xs, vs = read_table(self.table)
        return InitialCondition(lambda x: np.interp(x, xs, vs, left=0.0, right=0.0))


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelParams
    grid: GridSpec
    ic: InitialSpec
    experiment: str
    output_dir: str = "output"
    scheme: str = "caputo"
    boundary: str = "abc"
    padding: float = 8.0
    s0: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    levels: int = 3
    tolerance: float = 1.0e-3

    @classmethod
    def parse(cls, text: str, *, base_dir=None) -> "ExperimentConfig":
        """Parse config text; all problems raise :class:`ConfigError`."""
        raw, lines = _tokenize(text)
        missing = [k for k in REQUIRED if k not in raw]
        if missing:
            raise ConfigError(f"missing required key(s): {', '.join(missing)}", field=missing[0])
        values = {**DEFAULTS, **raw}
        base = Path(base_dir) if base_dir is not None else Path.cwd()
        return _build(values, lines, base)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.parse(text, base_dir=path.parent)

    def as_dict(self) -> dict[str, str]:
        """Canonical string form of every key."""
        return {
            "kappa": repr(self.model.kappa),
            "lambda": repr(self.model.lam),
            "gamma": repr(self.model.gamma),
            "x_left": repr(float(self.grid.x_left)),
            "x_right": repr(float(self.grid.x_right)),
            "n_cells": str(self.grid.n_cells),
            "t_final": repr(float(self.grid.time.t_final)),
            "n_steps": str(self.grid.time.n_steps),
            "experiment": self.experiment,
            "ic": self.ic.kind,
            "ic_center": repr(self.ic.center),
            "ic_width": repr(self.ic.width),
            "ic_mu": repr(self.ic.mu),
            "ic_table": self.ic.table,
            "scheme": self.scheme,
            "boundary": self.boundary,
            "padding": repr(self.padding),
            "s0": ", ".join(repr(s) for s in self.s0),
            "levels": str(self.levels),
            "tolerance": repr(self.tolerance),
            "output_dir": self.output_dir,
        }

    def serialize(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.as_dict().items())


def _tokenize(text: str) -> tuple[dict[str, str], dict[str, int]]:
    raw: dict[str, str] = {}
    lines: dict[str, int] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError("expected 'key = value'", line=number)
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", line=number, field=key)
        if key in raw:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", line=number, field=key)
        raw[key] = value
        lines[key] = number
    return raw, lines


class _Reader:
    def __init__(self, values, lines):
        self.values = values
        self.lines = lines

    def error(self, key, message):
        return ConfigError(message, line=self.lines.get(key), field=key)

    def real(self, key, *, positive=False, nonnegative=False) -> float:
        try:
            value = float(self.values[key])
        except ValueError:
            raise self.error(key, f"not a number: {self.values[key]!r}") from None
        if not math.isfinite(value):
            raise self.error(key, "must be finite")
        if positive and value <= 0.0:
            raise self.error(key, f"must be positive, got {value}")
        if nonnegative and value < 0.0:
            raise self.error(key, f"must be nonnegative, got {value}")
        return value

    def integer(self, key, minimum) -> int:
        try:
            value = int(self.values[key])
        except ValueError:
            raise self.error(key, f"not an integer: {self.values[key]!r}") from None
        if value < minimum:
            raise self.error(key, f"must be >= {minimum}, got {value}")
        return value

    def choice(self, key, options) -> str:
        value = self.values[key]
        if value not in options:
            raise self.error(key, f"must be one of {', '.join(options)}; got {value!r}")
        return value


def _build(values: dict[str, str], lines: dict[str, int], base: Path) -> ExperimentConfig:
    r = _Reader(values, lines)
    kappa = r.real("kappa", positive=True)
    lam = r.real("lambda", nonnegative=True)
    gamma = r.real("gamma")
    if not 0.0 < gamma < 1.0:
        raise r.error("gamma", f"must lie in (0, 1), got {gamma}")
    x_left, x_right = r.real("x_left"), r.real("x_right")
    if not x_left < x_right:
        raise r.error("x_right", f"must exceed x_left={x_left}, got {x_right}")
    n_cells = r.integer("n_cells", 2)
    t_final = r.real("t_final", positive=True)
    n_steps = r.integer("n_steps", 1)

    kind = r.choice("ic", IC_KINDS)
    table = values["ic_table"]
    if kind == "table":
        if not table:
            raise r.error("ic_table", "required when ic = table")
        path = Path(table)
        path = path if path.is_absolute() else (base / path)
        if not path.is_file():
            raise r.error("ic_table", f"file not found: {path}")
        table = str(path.resolve())
        try:
            read_table(table)
        except ValueError as exc:
            raise r.error("ic_table", f"unreadable table: {exc}") from None
    ic = InitialSpec(kind, r.real("ic_center"), r.real("ic_width", positive=True), r.real("ic_mu"), table)

    s0 = []
    for item in values["s0"].split(","):
        try:
            s = float(item)
        except ValueError:
            raise r.error("s0", f"not a number: {item.strip()!r}") from None
        if not (math.isfinite(s) and s > 0.0):
            raise r.error("s0", f"entries must be positive, got {s}")
        s0.append(s)

    output_dir = values["output_dir"]
    if not output_dir:
        raise r.error("output_dir", "must not be empty")

    try:
        model = ModelParams(kappa, lam, gamma)
        grid = GridSpec(x_left, x_right, n_cells, TimeGrid(t_final, n_steps))
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from None

    return ExperimentConfig(
        model=model,
        grid=grid,
        ic=ic,
        experiment=r.choice("experiment", EXPERIMENTS),
        output_dir=output_dir,
        scheme=r.choice("scheme", SCHEMES),
        boundary=r.choice("boundary", BOUNDARIES),
        padding=r.real("padding", positive=True),
        s0=tuple(s0),
        levels=r.integer("levels", 3),
        tolerance=r.real("tolerance", positive=True),
    )

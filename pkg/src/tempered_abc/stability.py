"""Discrete versions of the energy estimates for the bounded problem.

``energy_report`` checks the long-time estimate

    ||u(t)||^2 + 2 kappa D^{-gamma, 2 lam} ||u_x||^2 (t) <= exp(-2 lam t) ||u_0||^2

at every time node, ``weighted_norm_report`` checks

    int_0^inf exp(-2 s0 t) ||u(t)||^2 dt <= ||u_0||^2 / (2 s0),

and ``alikhanov_check`` tests ``w D^a w >= D^a (w^2) / 2`` for the L1
operator.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
from scipy import integrate

from .calculus import SampledFunction, caputo_l1, check_order, tempered_integral
from .errors import InvalidInputError, StabilityViolation
from .io import format_float
from .solver import ModelParams, SolutionHistory

#: Multiplier of the truncation order in the slack of both estimates.
SLACK_FACTOR = 10.0


def truncation_slack(history: SolutionHistory, params: ModelParams) -> float:
    """``SLACK_FACTOR * (tau^(2-gamma) + h^2)``."""
    tau, h = history.grid.time.step, history.grid.h
    return SLACK_FACTOR * (tau ** (2.0 - params.gamma) + h**2)


def _params(history: SolutionHistory, params: ModelParams | None) -> ModelParams:
    params = params if params is not None else history.params
    if params is None:
        raise InvalidInputError("model parameters are required")
    return params


def spatial_norms(history: SolutionHistory) -> tuple[np.ndarray, np.ndarray]:
    """Squared L2 norms of ``u`` and ``u_x`` at each time (trapezoidal rule)."""
    u, x = history.values, history.x
    u_x = np.gradient(u, history.grid.h, axis=1)
    l2 = integrate.trapezoid(u * u, x, axis=1)
    grad = integrate.trapezoid(u_x * u_x, x, axis=1)
    return l2, grad


@dataclass(frozen=True)
class EnergyLedger:
    """Per-step terms of the long-time estimate."""

    times: np.ndarray
    l2_norm_sq: np.ndarray
    grad_norm_sq: np.ndarray
    tempered_accum: np.ndarray
    bound: np.ndarray
    slack: float

    @property
    def lhs(self) -> np.ndarray:
        return self.l2_norm_sq + self.tempered_accum

    @property
    def margin(self) -> np.ndarray:
        """``bound + slack - lhs``; nonnegative where the estimate holds."""
        return self.bound + self.slack - self.lhs

    @property
    def holds(self) -> bool:
        return bool(np.all(self.margin >= 0.0))

    def write_csv(self, path) -> None:
        columns = ["times", "l2_norm_sq", "grad_norm_sq", "tempered_accum", "bound", "margin"]
        rows = zip(*(getattr(self, name) for name in columns))
        _write_rows(path, columns, rows)


def energy_report(history: SolutionHistory, params: ModelParams | None = None,
                  *, check: bool = True) -> EnergyLedger:
    """Evaluate the long-time estimate on a computed history.

    Raises :class:`StabilityViolation` (when ``check``) if the estimate fails
    anywhere by more than ``truncation_slack * ||u_0||^2``.
    """
    params = _params(history, params)
    l2, grad = spatial_norms(history)
    grid = history.grid.time
    accum = 2.0 * params.kappa * tempered_integral(
        SampledFunction(grid, grad), params.gamma, 2.0 * params.lam
    ).values
    times = grid.nodes
    bound = np.exp(-2.0 * params.lam * times) * l2[0]
    ledger = EnergyLedger(times, l2, grad, accum, bound, truncation_slack(history, params) * l2[0])
    if check and not ledger.holds:
        worst = int(np.argmin(ledger.margin))
        raise StabilityViolation(
            f"long-time estimate violated at t={times[worst]:.6g}: "
            f"lhs={ledger.lhs[worst]:.6e} > bound={bound[worst]:.6e} + slack={ledger.slack:.3e}"
        )
    return ledger


@dataclass(frozen=True)
class WeightedNormReport:
    """Terms of the exponentially weighted estimate for one ``s0``."""

    s0: float
    weighted_integral: float
    bound: float
    tail_estimate: float
    slack: float

    @property
    def margin(self) -> float:
        return self.bound + self.slack - self.weighted_integral - self.tail_estimate

    @property
    def holds(self) -> bool:
        return self.margin >= 0.0

    def as_row(self) -> dict:
        row = {f.name: getattr(self, f.name) for f in fields(self)}
        row["margin"] = self.margin
        return row


def weighted_norm_report(history: SolutionHistory, s0: float, params: ModelParams | None = None,
                         *, check: bool = True) -> WeightedNormReport:
    """Evaluate ``int_0^T e^{-2 s0 t} ||u||^2 dt`` plus a bound on the tail.

    The part beyond ``T`` is bounded with the long-time estimate,
    ``||u(t)||^2 <= e^{-2 lam t} ||u_0||^2``, giving
    ``||u_0||^2 e^{-2 (s0+lam) T} / (2 (s0+lam))``.
    """
    if not (math.isfinite(s0) and s0 > 0.0):
        raise InvalidInputError(f"s0 must be positive, got {s0}")
    params = _params(history, params)
    l2, _ = spatial_norms(history)
    t = history.times
    weighted = float(integrate.trapezoid(np.exp(-2.0 * s0 * t) * l2, t))
    rate = 2.0 * (s0 + params.lam)
    tail = float(l2[0] * math.exp(-rate * t[-1]) / rate)
    bound = float(l2[0] / (2.0 * s0))
    report = WeightedNormReport(s0, weighted, bound, tail, truncation_slack(history, params) * bound)
    if check and not report.holds:
        raise StabilityViolation(
            f"weighted estimate violated for s0={s0}: {weighted:.6e} + {tail:.3e} > {bound:.6e}"
        )
    return report


def write_weighted_csv(path, reports) -> None:
    columns = ["s0", "weighted_integral", "bound", "tail_estimate", "slack", "margin"]
    _write_rows(path, columns, ([r.as_row()[c] for c in columns] for r in reports))


def alikhanov_sides(trace: SampledFunction, order: float) -> tuple[np.ndarray, np.ndarray]:
    """``(w * D w, D(w^2) / 2)`` at every node with the L1 operator ``D``."""
    order = check_order(order)
    w = trace.values
    left = w * caputo_l1(trace, order)
    right = 0.5 * caputo_l1(SampledFunction(trace.grid, w * w), order)
    return left, right


def alikhanov_check(trace: SampledFunction, order: float, *, rtol: float = 1.0e-12) -> bool:
    """Whether ``w D w >= D(w^2) / 2`` holds at every node, up to rounding."""
    left, right = alikhanov_sides(trace, order)
    scale = np.abs(left) + np.abs(right)
    tol = rtol * (scale + scale.max())
    return bool(np.all(left - right >= -tol))


def _write_rows(path, columns, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_float(v) for v in row])

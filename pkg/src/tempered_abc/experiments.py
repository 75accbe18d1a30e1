"""Experiment runners behind the command line.

Each runner returns a list of :class:`Check` rows plus a dictionary of
metrics, and writes its CSV artifacts into ``<output>/<experiment>/``.
:func:`run` wraps that into a :class:`RunReport`, writes ``summary.txt`` and
``metrics.json`` once at the end, and measures wall-clock time. The JSON
never contains the wall-clock value, so identical configs give identical
bytes.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .calculus import SampledFunction, TimeGrid
from .config import ExperimentConfig
from .identities import (
    alikhanov_suite,
    branch_positivity,
    exponential_family,
    derivative_transform_checks,
    parseval_spotcheck,
    talbot_roundtrip,
)
from .io import format_float, write_history_csv
from .oracle import PaddedGrid, exact_mode, solve_truncated
from .solver import GridSpec, boundary_flux_residual, solve_caputo_form, solve_rl_form
from .stability import alikhanov_check, energy_report, weighted_norm_report, write_weighted_csv

#: Environment variable that overrides the directory relative outputs go to.
OUTPUT_ROOT_ENV = "TEMPERED_ABC_OUTPUT_ROOT"

IDENTITY_TOL = 1.0e-6
PARSEVAL_TOL = 1.0e-4
TALBOT_TOL = 1.0e-8
ORDER_BAND = 0.3


@dataclass(frozen=True)
class Check:
    """One asserted comparison: ``value <op> limit``."""

    name: str
    value: float
    limit: float
    op: str = "<="

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        if self.op == "<=":
            return self.value <= self.limit
        if self.op == ">=":
            return self.value >= self.limit
        return self.value > self.limit

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.6g} {self.op} {self.limit:.6g}"


@dataclass(frozen=True)
class RunReport:
    experiment: str
    config_text: str
    metrics: dict = field(default_factory=dict)
    checks: tuple[Check, ...] = ()
    scheme: dict = field(default_factory=dict)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        """Deterministic JSON (sorted keys, 17 digits, no wall-clock)."""
        doc = {
            "experiment": self.experiment,
            "config": self.config_text,
            "metrics": {k: _jsonable(v) for k, v in self.metrics.items()},
            "scheme": {k: _jsonable(v) for k, v in self.scheme.items()},
            "checks": [
                {"name": c.name, "value": format_float(c.value), "op": c.op,
                 "limit": format_float(c.limit), "passed": c.passed}
                for c in self.checks
            ],
            "passed": self.passed,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def summary(self) -> str:
        lines = [f"experiment: {self.experiment}"]
        lines += [c.line() for c in self.checks]
        lines.append(f"wall-clock: {self.wall_clock:.2f} s")
        lines.append("result: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def _jsonable(value):
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def output_root(config: ExperimentConfig) -> Path:
    out = Path(config.output_dir)
    if out.is_absolute():
        return out
    root = os.environ.get(OUTPUT_ROOT_ENV)
    return (Path(root) if root else Path.cwd()) / out


def _solve(config: ExperimentConfig, grid: GridSpec | None = None, boundary: str | None = None):
    grid = config.grid if grid is None else grid
    boundary = config.boundary if boundary is None else boundary
    solver = solve_caputo_form if config.scheme == "caputo" else solve_rl_form
    return solver(config.model, grid, config.ic.build(), boundary=boundary)


def _rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    ref = np.linalg.norm(b)
    diff = np.linalg.norm(a - b)
    return float(diff / ref) if ref > 0.0 else float(diff)


# {{{ experiments


def abc_vs_oracle(config: ExperimentConfig, out: Path):
    history = _solve(config, boundary="abc")
    oracle = solve_truncated(config.model, PaddedGrid(config.grid, config.padding), config.ic.build())
    error = _rel_l2(history.values, oracle.values)
    residual = float(boundary_flux_residual(history).max())
    write_history_csv(out / "abc.csv", history)
    write_history_csv(out / "oracle.csv", oracle)
    metrics = {"relative_l2_error": error, "boundary_residual": residual}
    return metrics, [Check("relative space-time L2 error", error, config.tolerance)]


def richardson_order(coarse: np.ndarray, mid: np.ndarray, fine: np.ndarray) -> float:
    """``log2(|u_1 - u_2| / |u_2 - u_3|)`` on nodes shared by all three levels."""
    d1 = np.linalg.norm(coarse - mid)
    d2 = np.linalg.norm(mid - fine)
    if d1 == 0.0 or d2 == 0.0:
        return math.nan
    return math.log2(d1 / d2)


def _final_profile(history, stride: int) -> np.ndarray:
    return history.values[-1, ::stride]


def convergence(config: ExperimentConfig, out: Path, levels: int | None = None):
    """Three-or-more level refinement; ``levels`` halvings of ``h`` and ``tau``.

    The spatial study refines ``h`` at the finest ``tau`` and the temporal
    study refines ``tau`` at the finest ``h``; orders come from the last three
    levels, compared at the final time on the coarsest spatial nodes.
    """
    levels = config.levels if levels is None else levels
    if levels < 3:
        raise ValueError("convergence needs at least three levels")
    base = config.grid
    scale = 2 ** (levels - 1)
    finest_steps = base.time.n_steps * scale
    finest_cells = base.n_cells * scale

    def grid(cells, steps):
        return GridSpec(base.x_left, base.x_right, cells, TimeGrid(base.time.t_final, steps))

    rows = []
    spatial, temporal = [], []
    for k in range(levels):
        cells, steps = base.n_cells * 2**k, base.time.n_steps * 2**k
        hs = _solve(config, grid(cells, finest_steps))
        ht = _solve(config, grid(finest_cells, steps))
        spatial.append(_final_profile(hs, 2**k))
        temporal.append(_final_profile(ht, scale))
        rows.append((cells, steps, hs.grid.h, ht.grid.time.step))

    p_space = [richardson_order(*spatial[k : k + 3]) for k in range(levels - 2)]
    p_time = [richardson_order(*temporal[k : k + 3]) for k in range(levels - 2)]

    metrics = {"spatial_orders": p_space, "temporal_orders": p_time}
    if config.ic.kind == "sine" and config.boundary == "dirichlet":
        # distance to the separable solution on the finest run (the last hs)
        exact = exact_mode(config.model, config.ic.mu, hs.x, base.time.t_final)
        metrics["final_time_max_error"] = float(np.abs(hs.values[-1] - exact).max())

    out.mkdir(parents=True, exist_ok=True)
    with (out / "orders.csv").open("w", newline="\n") as fh:
        fh.write("n_cells,n_steps,h,tau,spatial_order,temporal_order\n")
        for k, (cells, steps, h, tau) in enumerate(rows):
            ps = p_space[k - 2] if k >= 2 else math.nan
            pt = p_time[k - 2] if k >= 2 else math.nan
            fh.write(",".join([str(cells), str(steps)] + [format_float(v) for v in (h, tau, ps, pt)]) + "\n")

    target_time = 2.0 - config.model.gamma
    checks = [
        Check("spatial order deviation from 2", abs(p_space[-1] - 2.0), ORDER_BAND),
        Check("temporal order", p_time[-1], target_time - ORDER_BAND, ">="),
    ]
    return metrics, checks


def energy(config: ExperimentConfig, out: Path):
    history = _solve(config)
    ledger = energy_report(history, check=False)
    reports = [weighted_norm_report(history, s0, check=False) for s0 in config.s0]
    ledger.write_csv(out / "energy.csv")
    write_weighted_csv(out / "weighted.csv", reports)
    traces = history.traces
    grid = history.grid.time
    alikhanov_failures = sum(
        not alikhanov_check(SampledFunction(grid, tr), order)
        for tr in (traces.left, traces.right)
        for order in (config.model.gamma, config.model.gamma / 2.0)
    )
    checks = [Check("energy estimate worst margin", float(ledger.margin.min()), 0.0, ">=")]
    checks += [Check(f"weighted estimate margin s0={r.s0:g}", r.margin, 0.0, ">=") for r in reports]
    checks.append(Check("Alikhanov failures on boundary traces", float(alikhanov_failures), 0.0))
    metrics = {
        "energy_worst_margin": float(ledger.margin.min()),
        # t = 0 is excluded: there lhs equals the bound by construction
        "energy_worst_ratio": float(np.max(ledger.lhs[1:] / np.maximum(ledger.bound[1:], np.finfo(float).tiny))),
        "weighted_margins": [r.margin for r in reports],
    }
    return metrics, checks


def transform_identities(config: ExperimentConfig | None, out: Path):
    records = derivative_transform_checks()
    out.mkdir(parents=True, exist_ok=True)
    with (out / "identities.csv").open("w", newline="\n") as fh:
        fh.write("order,rate,s_real,s_imag,rl_error,caputo_error\n")
        for r in records:
            fh.write(",".join(format_float(v) for v in
                              (r.order, r.rate, r.s.real, r.s.imag, r.rl_error, r.caputo_error)) + "\n")
    worst = max(max(r.rl_error, r.caputo_error) for r in records)
    talbot = talbot_roundtrip()
    branch = branch_positivity()
    alikhanov_failures = alikhanov_suite()
    metrics = {"worst_identity_error": worst, "talbot_error": talbot, "branch_min_real_part": branch}
    checks = [
        Check("transform identities worst relative error", worst, IDENTITY_TOL),
        Check("Talbot round trip", talbot, TALBOT_TOL),
        Check("branch positivity min Re", branch, 0.0, ">"),
        Check("Alikhanov failures on random traces", float(alikhanov_failures), 0.0),
    ]
    return metrics, checks


def parseval(config: ExperimentConfig | None, out: Path):
    errors = []
    out.mkdir(parents=True, exist_ok=True)
    with (out / "parseval.csv").open("w", newline="\n") as fh:
        fh.write("case,s0,relative_discrepancy\n")
        for k, (u, v, s0) in enumerate(exponential_family()):
            err = parseval_spotcheck(u, v, s0)
            errors.append(err)
            fh.write(f"{k},{format_float(s0)},{format_float(err)}\n")
    return {"parseval_errors": errors}, [Check("Parseval worst relative discrepancy", max(errors), PARSEVAL_TOL)]


RUNNERS = {
    "abc-vs-oracle": abc_vs_oracle,
    "convergence": convergence,
    "energy": energy,
    "transform-identities": transform_identities,
    "parseval-spotcheck": parseval,
}


# }}}


def _finish(experiment, config_text, metrics, checks, scheme, out: Path, start: float) -> RunReport:
    report = RunReport(experiment, config_text, metrics, tuple(checks), scheme, time.perf_counter() - start)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.json").write_text(report.to_json())
    (out / "summary.txt").write_text(report.summary())
    return report


def run(config: ExperimentConfig, *, levels: int | None = None) -> RunReport:
    """Run the experiment named in ``config`` and write its artifacts."""
    start = time.perf_counter()
    root = output_root(config)
    runner = RUNNERS[config.experiment]
    sub = root / config.experiment
    if config.experiment == "convergence":
        metrics, checks = runner(config, sub, levels)
    else:
        metrics, checks = runner(config, sub)
    scheme = {
        "scheme": config.scheme,
        "weights": "L1" if config.scheme == "caputo" else "GL",
        "boundary": config.boundary,
        "h": config.grid.h,
        "tau": config.grid.time.step,
    }
    return _finish(config.experiment, config.serialize(), metrics, checks, scheme, sub, start)


def check_identities(out: Path) -> RunReport:
    """Identity, Parseval and Alikhanov suites without a config."""
    start = time.perf_counter()
    m1, c1 = transform_identities(None, out / "transform-identities")
    m2, c2 = parseval(None, out / "parseval-spotcheck")
    return _finish("check-identities", "", {**m1, **m2}, c1 + c2, {}, out, start)

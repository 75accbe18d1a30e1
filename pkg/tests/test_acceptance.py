"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL`` line (visible with or
without ``-s``) before asserting.
"""

import math
import time

import numpy as np
import pytest

from tempered_abc.calculus import SampledFunction, TimeGrid, tempered_caputo, tempered_rl
from tempered_abc.identities import (
    alikhanov_suite,
    branch_positivity,
    exponential_family,
    derivative_transform_checks,
    parseval_spotcheck,
)
from tempered_abc.oracle import PaddedGrid, solve_truncated
from tempered_abc.solver import GridSpec, InitialCondition, ModelParams, solve_caputo_form, solve_rl_form
from tempered_abc.stability import alikhanov_check, energy_report, weighted_norm_report

CAPUTO_EXP_T = 0.415107497420594703
RL_EXP = 0.207553748710297352


@pytest.fixture
def record(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def rel_l2(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def test_criterion_01_operator_closed_forms(record):
    start = time.perf_counter()
    worst_zero = 0.0
    for lam in (0.5, 1.0, 2.0):
        for order in (0.3, 0.5, 0.8):
            f = SampledFunction.from_callable(lambda t: np.exp(-lam * t), TimeGrid(1.0, 1000))
            worst_zero = max(worst_zero, np.abs(tempered_caputo(f, order, lam).values).max())
    grid = TimeGrid(1.0, 1000)
    affine = tempered_caputo(SampledFunction.from_callable(lambda t: np.exp(-t) * t, grid), 0.5, 1.0)
    rl = tempered_rl(SampledFunction.from_callable(lambda t: np.exp(-t), grid), 0.5, 1.0)
    err_affine = abs(affine.values[-1] - CAPUTO_EXP_T)
    err_rl = abs(rl.values[-1] - RL_EXP)
    elapsed = time.perf_counter() - start
    ok = worst_zero <= 1e-12 and err_affine <= 1e-6 and err_rl <= grid.step and elapsed < 1.0
    record(1, ok, f"zero={worst_zero:.1e} affine={err_affine:.1e} rl={err_rl:.1e} (step 1e-3) t={elapsed:.2f}s")


def test_criterion_02_transform_identities(record):
    start = time.perf_counter()
    records = derivative_transform_checks()
    elapsed = time.perf_counter() - start
    worst = max(max(r.rl_error, r.caputo_error) for r in records)
    record(2, len(records) == 27 and worst <= 1e-6 and elapsed < 10.0,
           f"{len(records)} cases, worst rel {worst:.1e}, t={elapsed:.2f}s")


def test_criterion_03_interior_convergence(record):
    from tempered_abc.experiments import richardson_order

    start = time.perf_counter()
    params = ModelParams(1.0, 0.5, 0.5)
    ic = InitialCondition(np.sin)

    def final(cells, steps):
        grid = GridSpec(0.0, math.pi, cells, TimeGrid(1.0, steps))
        return solve_caputo_form(params, grid, ic, boundary="dirichlet").values[-1]

    cells, steps = (50, 100, 200), (100, 200, 400)
    p_space = richardson_order(*(final(c, 400)[:: c // 50] for c in cells))
    p_time = richardson_order(*(final(200, n)[::4] for n in steps))
    elapsed = time.perf_counter() - start
    ok = abs(p_space - 2.0) <= 0.3 and p_time >= 1.2 and elapsed < 30.0
    record(3, ok, f"spatial {p_space:.3f}, temporal {p_time:.3f}, t={elapsed:.2f}s")


def test_criterion_04_abc_accuracy(record, gaussian_benchmark):
    params, grid, ic, _ = gaussian_benchmark
    start = time.perf_counter()
    hist = solve_caputo_form(params, grid, ic)
    oracle = solve_truncated(params, PaddedGrid(grid, 8.0), ic)  # doubling-validated
    elapsed = time.perf_counter() - start
    err = rel_l2(hist.values, oracle.values)
    record(4, err <= 1e-3 and elapsed < 60.0, f"rel L2 {err:.2e}, t={elapsed:.2f}s")


def test_criterion_05_scheme_equivalence(record):
    params = ModelParams(1.0, 0.1, 0.8)
    ic = InitialCondition(lambda x: np.exp(-25.0 * x**2))
    gaps = []
    for cells, steps in ((100, 200), (200, 400), (400, 800)):
        grid = GridSpec(-1.0, 1.0, cells, TimeGrid(1.0, steps))
        cap = solve_caputo_form(params, grid, ic)
        gaps.append(rel_l2(solve_rl_form(params, grid, ic).values, cap.values))
    ratios = [a / b for a, b in zip(gaps, gaps[1:])]
    ok = gaps[1] <= 1e-2 and min(ratios) >= 1.5
    record(5, ok, f"gap at 200/400 {gaps[1]:.2e}, shrink ratios {', '.join(f'{r:.2f}' for r in ratios)}")


def test_criterion_06_long_time_estimate(record, gaussian_benchmark):
    _, _, _, hist = gaussian_benchmark
    ledger = energy_report(hist, check=False)
    ratio = float(np.max(ledger.lhs[1:] / ledger.bound[1:]))
    record(6, ledger.holds, f"worst margin {ledger.margin.min():.3e} (slack {ledger.slack:.2e}), "
                            f"max lhs/bound for t>0 {ratio:.3f}")


def test_criterion_07_weighted_estimate(record, gaussian_benchmark):
    _, _, _, hist = gaussian_benchmark
    reports = [weighted_norm_report(hist, s0, check=False) for s0 in (0.5, 1.0, 2.0, 4.0)]
    margins = ", ".join(f"{r.s0:g}:{r.margin:.3e}" for r in reports)
    record(7, all(r.holds for r in reports), f"margins {margins}")


def test_criterion_08_alikhanov(record, gaussian_benchmark):
    params, _, _, hist = gaussian_benchmark
    failures = alikhanov_suite(count=100)
    grid = hist.grid.time
    traces_ok = all(alikhanov_check(SampledFunction(grid, tr), params.gamma)
                    for tr in (hist.traces.left, hist.traces.right))
    record(8, failures == 0 and traces_ok, f"random-trace failures {failures}, boundary traces ok={traces_ok}")


def test_criterion_09_branch_positivity(record):
    worst = branch_positivity(count=1000)
    record(9, worst > 0.0, f"min Re((s+lam)^beta) = {worst:.3e}")


def test_criterion_10_parseval(record):
    errors = [parseval_spotcheck(u, v, s0) for u, v, s0 in exponential_family()]
    record(10, max(errors) <= 1e-4, f"worst rel discrepancy {max(errors):.2e}")

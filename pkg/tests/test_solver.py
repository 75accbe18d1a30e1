import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tempered_abc.calculus import TimeGrid
from tempered_abc.errors import InvalidInputError, SolverFailure
from tempered_abc.oracle import exact_mode
from tempered_abc.solver import (
    GridSpec,
    InitialCondition,
    ModelParams,
    SolutionHistory,
    boundary_flux_residual,
    solve_caputo_form,
    solve_rl_form,
    starting_weights,
)

ZERO = InitialCondition(np.zeros_like)
BUMP = InitialCondition(lambda x: np.exp(-25.0 * x**2))


def strip(n_cells, n_steps, t_final=1.0):
    return GridSpec(0.0, math.pi, n_cells, TimeGrid(t_final, n_steps))


class TestTypes:
    @pytest.mark.parametrize("args", [(0.0, 0.1, 0.5), (1.0, -0.1, 0.5), (1.0, 0.1, 1.0), (1.0, 0.1, 0.0)])
    def test_params_reject(self, args):
        with pytest.raises(InvalidInputError):
            ModelParams(*args)

    def test_grid_reject(self):
        t = TimeGrid(1.0, 10)
        with pytest.raises(InvalidInputError):
            GridSpec(1.0, 1.0, 10, t)
        with pytest.raises(InvalidInputError):
            GridSpec(0.0, 1.0, 1, t)

    def test_grid_nodes(self):
        g = GridSpec(-1.0, 1.0, 4, TimeGrid(1.0, 2))
        assert g.h == 0.5
        np.testing.assert_allclose(g.x, [-1, -0.5, 0, 0.5, 1])

    def test_support_check(self):
        g = GridSpec(-0.5, 0.5, 20, TimeGrid(1.0, 5))
        with pytest.raises(InvalidInputError):
            solve_caputo_form(ModelParams(1, 0, 0.5), g, BUMP)

    def test_history_shape_and_read_only(self):
        g = GridSpec(-1.0, 1.0, 10, TimeGrid(1.0, 5))
        with pytest.raises(InvalidInputError):
            SolutionHistory(g, np.zeros((5, 11)))
        with pytest.raises(SolverFailure):
            SolutionHistory(g, np.full((6, 11), np.nan))
        hist = SolutionHistory(g, np.zeros((6, 11)))
        with pytest.raises(ValueError):
            hist.values[0, 0] = 1.0

    def test_traces_and_restrict(self):
        g = GridSpec(-1.0, 1.0, 4, TimeGrid(1.0, 1))
        hist = SolutionHistory(g, np.arange(10.0).reshape(2, 5))
        np.testing.assert_array_equal(hist.traces.left, [0, 5])
        np.testing.assert_array_equal(hist.traces.right, [4, 9])
        assert hist.restrict(-0.5, 0.5).shape == (2, 3)


class TestZeroSolution:
    @pytest.mark.parametrize("solver", [solve_caputo_form, solve_rl_form])
    @pytest.mark.parametrize("boundary", ["abc", "dirichlet"])
    def test_zero(self, solver, boundary):
        g = GridSpec(-1.0, 1.0, 20, TimeGrid(1.0, 10))
        hist = solver(ModelParams(1.0, 0.3, 0.6), g, ZERO, boundary=boundary)
        assert not np.any(hist.values)
        if boundary == "abc":
            assert not np.any(boundary_flux_residual(hist))


class TestDirichletMode:
    params = ModelParams(1.0, 0.5, 0.5)

    def test_matches_separable_solution(self):
        g = strip(100, 200)
        hist = solve_caputo_form(self.params, g, InitialCondition(np.sin), boundary="dirichlet")
        exact = exact_mode(self.params, 1.0, g.x[None, :], g.time.nodes[:, None])
        err = np.abs(hist.values - exact).max()
        assert err <= 10.0 * (g.time.step**1.5 + g.h**2)

    def test_orders(self):
        def final(cells, steps, correction=True):
            h = solve_caputo_form(self.params, strip(cells, steps), InitialCondition(np.sin),
                                  boundary="dirichlet", correction=correction)
            return h.values[-1]

        exact = exact_mode(self.params, 1.0, strip(50, 1).x, 1.0)
        e_space = [np.abs(final(c, 3200)[:: c // 50] - exact).max() for c in (50, 100)]
        assert math.log2(e_space[0] / e_space[1]) == pytest.approx(2.0, abs=0.2)

        fine = final(200, 400)
        mid, coarse = final(200, 200), final(200, 100)
        p = math.log2(np.linalg.norm(coarse - mid) / np.linalg.norm(mid - fine))
        assert p >= 1.2
        # the uncorrected L1 start is only first order on this data
        fine, mid, coarse = (final(200, n, False) for n in (400, 200, 100))
        assert math.log2(np.linalg.norm(coarse - mid) / np.linalg.norm(mid - fine)) < 1.2

    def test_starting_weights_make_l1_exact_for_power(self):
        from scipy import special

        from tempered_abc.calculus import SampledFunction, caputo_l1

        gamma, n = 0.4, 30
        grid = TimeGrid(1.0, n)
        f = SampledFunction.from_callable(lambda t: t**gamma, grid)
        w = starting_weights(gamma, n, grid.step)
        corrected = caputo_l1(f, gamma)[1:] + w[1:] * (f.values[1] - f.values[0])
        np.testing.assert_allclose(corrected, special.gamma(1 + gamma), rtol=1e-12)


class TestAbsorbing:
    def test_residual_small(self, gaussian_benchmark):
        _, _, _, hist = gaussian_benchmark
        assert boundary_flux_residual(hist).max() <= 1e-10

    def test_rl_residual_small(self, gaussian_benchmark):
        params, grid, ic, _ = gaussian_benchmark
        assert boundary_flux_residual(solve_rl_form(params, grid, ic)).max() <= 1e-10

    def test_dirichlet_negative_control(self, gaussian_benchmark):
        params, grid, ic, _ = gaussian_benchmark
        dirichlet = solve_caputo_form(params, grid, ic, boundary="dirichlet")
        assert boundary_flux_residual(dirichlet).max() > 1e-3

    def test_rl_vs_caputo(self, gaussian_benchmark):
        params, grid, ic, cap = gaussian_benchmark
        rl = solve_rl_form(params, grid, ic)
        assert np.linalg.norm(rl.values - cap.values) / np.linalg.norm(cap.values) <= 1e-2

    def test_symmetry(self, gaussian_benchmark):
        _, _, _, hist = gaussian_benchmark
        np.testing.assert_allclose(hist.values, hist.values[:, ::-1], atol=1e-13)

    def test_mass_leaves_domain(self, gaussian_benchmark):
        _, _, _, hist = gaussian_benchmark
        assert np.all(hist.values[-1] < hist.values[0].max())
        assert hist.values[-1, 0] > 0.0  # the absorbing boundary lets the solution through

    @given(st.floats(0.1, 0.95), st.floats(0.0, 2.0), st.floats(0.2, 3.0))
    def test_residual_property(self, gamma, lam, kappa):
        params = ModelParams(kappa, lam, gamma)
        grid = GridSpec(-1.0, 1.0, 40, TimeGrid(0.5, 20))
        for solver in (solve_caputo_form, solve_rl_form):
            hist = solver(params, grid, BUMP)
            scale = np.abs(hist.values).max()
            assert boundary_flux_residual(hist).max() <= 1e-9 * max(scale, 1.0)

    def test_residual_needs_params(self):
        g = GridSpec(-1.0, 1.0, 4, TimeGrid(1.0, 1))
        with pytest.raises(InvalidInputError):
            boundary_flux_residual(SolutionHistory(g, np.zeros((2, 5))))

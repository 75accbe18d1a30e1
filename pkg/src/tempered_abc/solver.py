r"""Finite-difference solvers for the reaction-subdiffusion problem on an interval.

Two independent marchers are provided for the bounded problem with exact
absorbing boundary conditions

.. math::

    u_x = \pm\frac{1}{\sqrt{\kappa}}\, {}^C D_t^{\gamma/2,\lambda} u
    \quad\text{at } x = x_l \ (+),\ x = x_r \ (-).

* :func:`solve_caputo_form` marches the Caputo form
  :math:`{}^C D_t^{\gamma}(e^{\lambda t}u) = \kappa (e^{\lambda t}u)_{xx}` with
  the L1 scheme in time and central differences in space.
* :func:`solve_rl_form` marches :math:`u_t = \kappa D_t^{1-\gamma,\lambda} u_{xx} - \lambda u`
  directly, with backward Euler for :math:`u_t` and tempered GL weights for
  the Riemann-Liouville operator.

Both eliminate a ghost node at each boundary using the boundary condition, so
every step is a single tridiagonal solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy import linalg, special

from .calculus import (
    CONJUGATION_LIMIT,
    SampledFunction,
    TimeGrid,
    caputo_l1,
    check_order,
    check_rate,
    gl_weights,
    l1_weights,
)
from .errors import InvalidInputError, SolverFailure

Scheme = Literal["caputo", "rl"]
Boundary = Literal["abc", "dirichlet"]

#: Tolerance on the initial profile at the artificial boundaries.
SUPPORT_TOL = 1.0e-10


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of ``u_t = kappa * D^{1-gamma,lam} u_xx - lam * u``."""

    kappa: float
    lam: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa > 0.0):
            raise InvalidInputError(f"kappa must be positive, got {self.kappa}")
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "lam", check_rate(self.lam))
        object.__setattr__(self, "gamma", check_order(self.gamma))


@dataclass(frozen=True)
class GridSpec:
    """Uniform space-time grid on ``[x_left, x_right] x [0, T]``."""

    x_left: float
    x_right: float
    n_cells: int
    time: TimeGrid

    def __post_init__(self):
        if not (math.isfinite(self.x_left) and math.isfinite(self.x_right)):
            raise InvalidInputError("interval end points must be finite")
        if not self.x_left < self.x_right:
            raise InvalidInputError(f"need x_left < x_right, got [{self.x_left}, {self.x_right}]")
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise InvalidInputError(f"n_cells must be an integer >= 2, got {self.n_cells}")
        object.__setattr__(self, "n_cells", int(self.n_cells))

    @property
    def h(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def x(self) -> np.ndarray:
        return self.x_left + self.h * np.arange(self.n_cells + 1)


@dataclass(frozen=True)
class InitialCondition:
    """Initial profile ``u_0``, which must vanish at both artificial boundaries."""

    profile: Callable[[np.ndarray], np.ndarray]
    support_tol: float = SUPPORT_TOL

    def sample(self, grid: GridSpec, *, check_support: bool = True) -> np.ndarray:
        values = np.broadcast_to(np.asarray(self.profile(grid.x), dtype=float), grid.x.shape).copy()
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("initial profile is not finite on the grid")
        if check_support and max(abs(values[0]), abs(values[-1])) > self.support_tol:
            raise InvalidInputError(
                "initial profile is not supported inside the interval: "
                f"u0(x_left)={values[0]:.3e}, u0(x_right)={values[-1]:.3e}"
            )
        return values


@dataclass(frozen=True)
class BoundaryHistory:
    """Traces ``u(x_left, t_k)`` and ``u(x_right, t_k)``."""

    left: np.ndarray
    right: np.ndarray


@dataclass(frozen=True)
class SolutionHistory:
    """Full space-time history ``values[n, j] = u(x_j, t_n)``.

    ``scheme`` and ``boundary`` record which marcher produced the history;
    :func:`boundary_flux_residual` needs them to rebuild the ghost values.
    """

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    params: ModelParams | None = None
    scheme: Scheme = "caputo"
    boundary: Boundary = "abc"
    corrected: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        expected = (self.grid.time.n_steps + 1, self.grid.n_cells + 1)
        if values.shape != expected:
            raise InvalidInputError(f"history shape {values.shape} != {expected}")
        if not np.all(np.isfinite(values)):
            raise SolverFailure("history contains non-finite values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def times(self) -> np.ndarray:
        return self.grid.time.nodes

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def traces(self) -> BoundaryHistory:
        return BoundaryHistory(self.values[:, 0].copy(), self.values[:, -1].copy())

    def restrict(self, x_left: float, x_right: float) -> np.ndarray:
        """Columns of ``values`` whose nodes lie in ``[x_left, x_right]``."""
        x = self.x
        eps = 1e-9 * self.grid.h
        mask = (x >= x_left - eps) & (x <= x_right + eps)
        return self.values[:, mask]


# {{{ linear algebra


def _solve_tridiagonal(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray):
    ab = np.zeros((3, diag.size))
    ab[0, 1:] = upper
    ab[1] = diag
    ab[2, :-1] = lower
    try:
        x = linalg.solve_banded((1, 1), ab, rhs, check_finite=False)
    except linalg.LinAlgError as exc:
        raise SolverFailure(f"tridiagonal solve failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SolverFailure("tridiagonal solve produced non-finite values")
    return x


def _assert_diagonally_dominant(lower, diag, upper) -> None:
    off = np.zeros_like(diag)
    off[1:] += np.abs(lower)
    off[:-1] += np.abs(upper)
    if not np.all(np.abs(diag) >= off):
        raise SolverFailure("assembled system is not diagonally dominant")


def _assemble(diag_value: float, off_value: float, n: int, boundary: Boundary, edge_diag: float,
              edge_off: float):
    """Constant tridiagonal matrix: ``diag_value`` / ``off_value`` inside."""
    diag = np.full(n, diag_value)
    lower = np.full(n - 1, off_value)
    upper = np.full(n - 1, off_value)
    if boundary == "dirichlet":
        diag[0] = diag[-1] = 1.0
        upper[0] = lower[-1] = 0.0
    else:
        diag[0] = diag[-1] = edge_diag
        upper[0] = lower[-1] = edge_off
    _assert_diagonally_dominant(lower, diag, upper)
    return lower, diag, upper


# }}}


# {{{ Caputo form


def _check_inputs(params, grid, ic):
    if not isinstance(params, ModelParams):
        raise InvalidInputError("params must be a ModelParams")
    if not isinstance(grid, GridSpec):
        raise InvalidInputError("grid must be a GridSpec")
    if not isinstance(ic, InitialCondition):
        raise InvalidInputError("ic must be an InitialCondition")


def starting_weights(gamma: float, n_steps: int, tau: float) -> np.ndarray:
    """Correction weights making the L1 operator exact for ``t**gamma``.

    Solutions of the subdiffusion equation behave like ``c0 + c1 t**gamma``
    near ``t = 0``; adding ``W[n] * (w^1 - w^0)`` to the L1 sum at level ``n``
    removes the resulting first-order error. ``W[0]`` is unused.
    """
    grid = TimeGrid(tau * n_steps, n_steps)
    power = SampledFunction(grid, grid.nodes**gamma)
    weights = (special.gamma(1.0 + gamma) - caputo_l1(power, gamma)) / tau**gamma
    weights[0] = 0.0
    return weights


def march_caputo(params: ModelParams, grid: GridSpec, u0: np.ndarray, boundary: Boundary = "abc",
                 *, conjugate: bool | None = None, correction: bool = True) -> np.ndarray:
    """March the Caputo form from sampled initial data; returns ``u`` history.

    With ``conjugate`` (the default when ``lam * T <= 600``) the unknown is
    ``v = exp(lam t) u``; otherwise ``u`` is marched with tempered weights.
    ``correction`` adds the :func:`starting_weights` term to the interior
    operator (the boundary operator is plain L1).
    """
    kappa, lam, gamma = params.kappa, params.lam, params.gamma
    tau, h = grid.time.step, grid.h
    n_steps, n = grid.time.n_steps, grid.n_cells + 1
    if conjugate is None:
        conjugate = lam * grid.time.t_final <= CONJUGATION_LIMIT

    a = tau ** (-gamma) / special.gamma(2.0 - gamma)
    c = tau ** (-gamma / 2) / special.gamma(2.0 - gamma / 2)
    b = l1_weights(gamma, n_steps).coeffs
    bb = l1_weights(gamma / 2, n_steps).coeffs
    corr = starting_weights(gamma, n_steps, tau) if correction else np.zeros(n_steps + 1)
    if conjugate:
        damp = np.ones(n_steps + 1)
    else:
        damp = np.exp(-lam * tau * np.arange(n_steps + 1))

    r = kappa / h**2
    edge = 2.0 * math.sqrt(kappa) * c / h

    def system(lead):
        return _assemble(lead + 2.0 * r, -r, n, boundary, lead + 2.0 * r + edge, -2.0 * r)

    first = system(a + corr[1])
    later = system(a) if n_steps > 1 else first

    w = np.empty((n_steps + 1, n))
    w[0] = u0
    if boundary == "dirichlet":
        w[0, 0] = w[0, -1] = 0.0
    # damp[k+1] = damp[k] * damp[1], so each L1 difference factors as
    # damp[k] * (w^m - damp[1] w^{m-1}) with m = n - k
    incr = np.empty_like(w)
    bd = b * damp[:-1]
    bbd = bb * damp[:-1]
    for step in range(1, n_steps + 1):
        known = damp[1] * w[step - 1]
        known_b = known[[0, -1]]
        if step == 1:
            rhs = (a + corr[1]) * known
        else:
            hist = incr[step - 1 : 0 : -1]
            known = known - bd[1:step] @ hist
            known_b = known_b - bbd[1:step] @ hist[:, [0, -1]]
            rhs = a * known - corr[step] * (damp[step - 1] * w[1] - damp[step] * w[0])
        if boundary == "dirichlet":
            rhs[0] = rhs[-1] = 0.0
        else:
            rhs[[0, -1]] += edge * known_b
        w[step] = _solve_tridiagonal(*(first if step == 1 else later), rhs)
        incr[step] = w[step] - damp[1] * w[step - 1]

    if conjugate:
        w *= np.exp(-lam * grid.time.nodes)[:, None]
    return w


def solve_caputo_form(params: ModelParams, grid: GridSpec, ic: InitialCondition,
                      *, boundary: Boundary = "abc", correction: bool = True) -> SolutionHistory:
    """Solve the bounded problem in its Caputo form (the primary scheme).

    ``boundary="dirichlet"`` replaces the absorbing rows by ``u = 0``; this
    is the standard subdiffusion solver used for regression checks.
    """
    _check_inputs(params, grid, ic)
    u0 = ic.sample(grid)
    values = march_caputo(params, grid, u0, boundary, correction=correction)
    return SolutionHistory(grid, values, params, "caputo", boundary, correction)


# }}}


# {{{ Riemann-Liouville form


def solve_rl_form(params: ModelParams, grid: GridSpec, ic: InitialCondition,
                  *, boundary: Boundary = "abc") -> SolutionHistory:
    """Solve the bounded problem in its original Riemann-Liouville form.

    Each step solves
    ``(1/tau + lam) u^n - kappa tau^(gamma-1) sum_k g_k e^{-lam k tau} L u^{n-k} = u^{n-1}/tau``
    where ``L`` is the discrete Laplacian with the boundary flux folded in.
    The GL sum acts on ``L u - L u^0``; the contribution of ``L u^0`` is
    integrated exactly over each step.
    """
    _check_inputs(params, grid, ic)
    kappa, lam, gamma = params.kappa, params.lam, params.gamma
    tau, h = grid.time.step, grid.h
    n_steps, n = grid.time.n_steps, grid.n_cells + 1

    decay = np.exp(-lam * tau * np.arange(n_steps + 2))
    g = gl_weights(1.0 - gamma, n_steps + 1).coeffs * decay[:-1]
    bb = l1_weights(gamma / 2, n_steps).coeffs
    c = tau ** (-gamma / 2) / special.gamma(2.0 - gamma / 2)
    mu = kappa * tau ** (gamma - 1.0)
    sk = math.sqrt(kappa)

    u = np.empty((n_steps + 1, n))
    u[0] = ic.sample(grid)
    if boundary == "dirichlet":
        u[0, 0] = u[0, -1] = 0.0
    lap = np.empty_like(u)
    lap[0] = _laplacian(u[0], h, flux=(0.0, 0.0))

    r = mu * g[0] / h**2
    edge = mu * g[0] * 2.0 * c / (h * sk)
    lower, diag, upper = _assemble(1.0 / tau + lam + 2.0 * r, -r, n, boundary,
                                   1.0 / tau + lam + 2.0 * r + edge, -2.0 * r)

    # GL weights act on L u - L u^0 only; the RL derivative of the constant
    # L u^0 is singular (~ t^(gamma-1)) and is integrated exactly over each step
    times = tau * np.arange(n_steps + 1)
    gl_sum = np.cumsum(g / decay[:-1])
    singular = np.diff(times**gamma) / (tau * special.gamma(1.0 + gamma))

    bbd = bb * decay[:n_steps]
    incr = np.empty((n_steps + 1, 2))
    for step in range(1, n_steps + 1):
        # tempered L1 history of the boundary traces
        known_b = decay[1] * u[step - 1, [0, -1]]
        if step > 1:
            known_b = known_b - bbd[1:step] @ incr[step - 1 : 0 : -1]
        rhs = u[step - 1] / tau + mu * (g[1 : step + 1] @ lap[step - 1 :: -1])
        rhs += decay[step] * (kappa * singular[step - 1] - mu * gl_sum[step]) * lap[0]
        if boundary == "dirichlet":
            rhs[0] = rhs[-1] = 0.0
        else:
            rhs[[0, -1]] += edge * known_b
        u[step] = _solve_tridiagonal(lower, diag, upper, rhs)
        incr[step] = u[step, [0, -1]] - decay[1] * u[step - 1, [0, -1]]

        if boundary == "dirichlet":
            lap[step] = _laplacian(u[step], h, flux=None)
        else:
            flux = c * (u[step, [0, -1]] - known_b) / sk
            lap[step] = _laplacian(u[step], h, flux=(flux[0], flux[1]))

    return SolutionHistory(grid, u, params, "rl", boundary)


def _laplacian(u: np.ndarray, h: float, flux) -> np.ndarray:
    """Second difference; end values use ghost nodes from the boundary flux.

    ``flux = (F_l, F_r)`` means ``u_x(x_l) = F_l`` and ``u_x(x_r) = -F_r``.
    With ``flux=None`` the end values are set to zero (Dirichlet rows).
    """
    out = np.empty_like(u)
    out[1:-1] = (u[:-2] - 2.0 * u[1:-1] + u[2:]) / h**2
    if flux is None:
        out[0] = out[-1] = 0.0
    else:
        out[0] = 2.0 * (u[1] - u[0]) / h**2 - 2.0 * flux[0] / h
        out[-1] = 2.0 * (u[-2] - u[-1]) / h**2 - 2.0 * flux[1] / h
    return out


# }}}


# {{{ boundary residual


def _tempered_l1_trace(trace: np.ndarray, order: float, lam: float, tau: float) -> np.ndarray:
    # tempered L1 Caputo derivative of a trace, 0 at t_0
    n_steps = trace.size - 1
    decay = np.exp(-lam * tau * np.arange(n_steps + 1))
    bd = l1_weights(order, n_steps).coeffs * decay[:-1]
    out = np.zeros(trace.size)
    out[1:] = np.convolve(bd, trace[1:] - decay[1] * trace[:-1])[:n_steps]
    return out * tau ** (-order) / special.gamma(2.0 - order)


def _boundary_laplacian(history: SolutionHistory, params: ModelParams, side: int) -> np.ndarray:
    """Second difference at a boundary node implied by the interior equation."""
    u = history.values[:, side]
    tau = history.grid.time.step
    kappa, lam, gamma = params.kappa, params.lam, params.gamma
    if history.scheme == "caputo":
        lap = _tempered_l1_trace(u, gamma, lam, tau)
        if history.corrected:
            n_steps = u.size - 1
            decay = np.exp(-lam * tau * np.arange(n_steps + 1))
            lap[1:] += starting_weights(gamma, n_steps, tau)[1:] * (decay[:-1] * u[1] - decay[1:] * u[0])
        return lap / kappa

    # RL form: solve the recursion of the scheme for the boundary Laplacian
    n_steps = u.size - 1
    decay = np.exp(-lam * tau * np.arange(n_steps + 1))
    g = gl_weights(1.0 - gamma, n_steps + 1).coeffs
    gl_sum = np.cumsum(g)
    g = g * decay
    singular = np.diff((tau * np.arange(n_steps + 1)) ** gamma) / (tau * special.gamma(1.0 + gamma))
    mu = kappa * tau ** (gamma - 1.0)
    nb = 1 if side == 0 else -2
    lap = np.empty(n_steps + 1)
    lap[0] = 2.0 * (history.values[0, nb] - u[0]) / history.grid.h**2
    for step in range(1, n_steps + 1):
        lhs = (1.0 / tau + lam) * u[step] - u[step - 1] / tau
        lhs -= decay[step] * (kappa * singular[step - 1] - mu * gl_sum[step]) * lap[0]
        lap[step] = (lhs / mu - g[1 : step + 1] @ lap[step - 1 :: -1]) / g[0]
    return lap


def boundary_flux_residual(history: SolutionHistory, params: ModelParams | None = None) -> np.ndarray:
    """Per-step residual of the absorbing conditions at both ends.

    The boundary derivative is the centered difference across the ghost node,
    which is recovered from the marcher's own interior equation at the
    boundary node. Returns ``max(|res_left|, |res_right|)`` for each time
    node (0 at ``t_0``).
    """
    params = params if params is not None else history.params
    if params is None:
        raise InvalidInputError("model parameters are required")
    h = history.grid.h
    tau = history.grid.time.step
    vals = history.values
    sk = math.sqrt(params.kappa)

    lap_l = _boundary_laplacian(history, params, 0)
    lap_r = _boundary_laplacian(history, params, -1)
    ux_l = (vals[:, 1] - vals[:, 0]) / h - 0.5 * h * lap_l
    ux_r = (vals[:, -1] - vals[:, -2]) / h + 0.5 * h * lap_r
    d_l = _tempered_l1_trace(vals[:, 0], params.gamma / 2, params.lam, tau) / sk
    d_r = _tempered_l1_trace(vals[:, -1], params.gamma / 2, params.lam, tau) / sk
    res = np.maximum(np.abs(ux_l - d_l), np.abs(ux_r + d_r))
    res[0] = 0.0
    return res


# }}}

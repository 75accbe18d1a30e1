"""Independent reference solutions.

* :func:`solve_truncated` solves on a much larger interval with homogeneous
  Dirichlet walls and restricts back; the walls are far enough away that the
  decay condition at infinity is effectively enforced.
* :func:`exact_mode` is the separable solution on a Dirichlet strip.
* :func:`halfline_ode_check` evaluates the transformed exterior problem
  whose decaying solutions produce the absorbing boundary condition.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchError, InvalidInputError, OracleInvalidError
from .laplace import check_laplace_point
from .mittag_leffler import mittag_leffler
from .solver import GridSpec, InitialCondition, ModelParams, SolutionHistory, march_caputo

#: Default padding length on each side of the inner interval.
DEFAULT_PADDING = 8.0


@dataclass(frozen=True)
class PaddedGrid:
    """Inner grid extended by ``padding`` on both sides with the same ``h``.

    The padding is rounded to a whole number of cells.
    """

    inner: GridSpec
    padding: float = DEFAULT_PADDING

    def __post_init__(self):
        if not (math.isfinite(self.padding) and self.padding > 0.0):
            raise InvalidInputError(f"padding must be positive, got {self.padding}")

    @property
    def pad_cells(self) -> int:
        return max(1, int(round(self.padding / self.inner.h)))

    @property
    def grid(self) -> GridSpec:
        m = self.pad_cells
        h = self.inner.h
        return GridSpec(self.inner.x_left - m * h, self.inner.x_right + m * h,
                        self.inner.n_cells + 2 * m, self.inner.time)

    def doubled(self) -> "PaddedGrid":
        return PaddedGrid(self.inner, 2.0 * self.pad_cells * self.inner.h)


def _truncated_values(params, padded: PaddedGrid, ic: InitialCondition) -> np.ndarray:
    grid = padded.grid
    u0 = ic.sample(grid, check_support=False)
    full = march_caputo(params, grid, u0, "dirichlet")
    m = padded.pad_cells
    return full[:, m : m + padded.inner.n_cells + 1]


def solve_truncated(params: ModelParams, padded: PaddedGrid, ic: InitialCondition,
                    *, validate: bool = True, doubling_tol: float = 1.0e-8) -> SolutionHistory:
    """Large-domain Dirichlet solve restricted to the inner interval.

    With ``validate`` the solve is repeated with doubled padding and the
    restricted histories must agree to ``doubling_tol`` (relative to
    ``max |u0|``); otherwise :class:`OracleInvalidError` is raised.
    """
    if not isinstance(padded, PaddedGrid):
        raise InvalidInputError("padded must be a PaddedGrid")
    u0 = ic.sample(padded.inner)  # support check on the inner interval
    values = _truncated_values(params, padded, ic)
    if validate:
        scale = max(np.abs(u0).max(), np.finfo(float).tiny)
        change = np.abs(_truncated_values(params, padded.doubled(), ic) - values).max() / scale
        if change > doubling_tol:
            raise OracleInvalidError(
                f"doubling the padding changed the solution by {change:.3e} > {doubling_tol:.1e}; "
                "enlarge the padding"
            )
    return SolutionHistory(padded.inner, values, params, "caputo", "dirichlet")


def exact_mode(params: ModelParams, mu: float, x, t):
    """``exp(-lam t) E_gamma(-kappa mu^2 t^gamma) sin(mu x)`` (broadcasts)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise InvalidInputError("exact_mode needs t >= 0")
    flat = np.unique(t)
    table = mittag_leffler(params.gamma, -params.kappa * mu**2 * flat**params.gamma)
    temporal = np.exp(-params.lam * t) * table[np.searchsorted(flat, t)]
    out = temporal * np.sin(mu * np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def principal_power(z: complex, beta: float) -> complex:
    """``z**beta`` on the principal branch, ``arg z`` in ``(-pi, pi]``."""
    z = complex(z)
    return abs(z) ** beta * cmath.exp(1j * beta * cmath.phase(z))


def abc_symbol(params: ModelParams, s: complex) -> complex:
    """Transformed boundary operator ``(s + lam)**(gamma/2) / sqrt(kappa)``."""
    s = check_laplace_point(s)
    root = principal_power(s + params.lam, params.gamma / 2)
    if root.real <= 0.0:
        raise BranchError(f"Re((s+lam)^(gamma/2)) = {root.real} <= 0 at s={s}")
    return root / math.sqrt(params.kappa)


def halfline_ode_check(params: ModelParams, s: complex, x_probe: float) -> float:
    """Residual of the transformed exterior equation at ``x_probe``.

    For ``x_probe >= 0`` the decaying solution ``exp(-x root / sqrt(kappa))``
    is used (right exterior), otherwise ``exp(+x root / sqrt(kappa))``, with
    ``root = (s + lam)**(gamma/2)``. Returns the larger of
    ``|(s+lam)^gamma u - kappa u_xx|`` and ``|u_x +- root u / sqrt(kappa)|``.
    """
    s = check_laplace_point(s)
    shifted = s + params.lam
    sk = math.sqrt(params.kappa)
    root = abc_symbol(params, s) * sk
    sign = -1.0 if x_probe >= 0.0 else 1.0
    rate = sign * root / sk
    u = cmath.exp(rate * x_probe)
    u_x = rate * u
    u_xx = rate * rate * u
    pde = abs(principal_power(shifted, params.gamma) * u - params.kappa * u_xx)
    flux = abs(u_x - sign * root / sk * u)
    return max(pde, flux)


def branch_real_parts(s, lam: float, betas) -> np.ndarray:
    """``Re((s + lam)**beta)`` for every ``s`` (rows) and ``beta`` (columns)."""
    s = np.asarray(s, dtype=complex).ravel() + lam
    betas = np.asarray(betas, dtype=float).ravel()
    return np.power(s[:, None], betas[None, :]).real

r"""Tempered fractional operators on uniform time grids.

All tempered operators are evaluated through the conjugation identity

.. math::

    D^{\alpha,\lambda} f(t) = e^{-\lambda t} D^{\alpha}\big(e^{\lambda t} f(t)\big),

i.e. the samples are multiplied by :math:`e^{\lambda t}`, the untempered
scheme is applied and the result is multiplied by :math:`e^{-\lambda t}`.
When :math:`\lambda T` is too large for that to be safe in floating point
the same algebra is carried out with tempered weights instead.

Discretizations:

* Caputo: L1 scheme (piecewise-linear product integration).
* Riemann-Liouville: Grünwald-Letnikov weights.
* Riemann-Liouville integral: product integration with a piecewise-constant
  (right endpoint) density and exact kernel moments.

The module also carries two pointwise evaluators built on Gauss-Jacobi
quadrature, used as references for the transform identities.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy import special

from .errors import InvalidInputError

#: Above this value of ``rate * t_final`` the conjugation route is replaced
#: by tempered weights to avoid overflow in ``exp(rate * t)``.
CONJUGATION_LIMIT = 600.0


def check_order(order: float, *, allow_one: bool = False) -> float:
    """Validate a fractional order, returning it as a float."""
    order = float(order)
    upper_ok = order <= 1.0 if allow_one else order < 1.0
    if not (math.isfinite(order) and order > 0.0 and upper_ok):
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise InvalidInputError(f"order must lie in {bound}, got {order}")
    return order


def check_rate(rate: float) -> float:
    """Validate a tempering rate (must be finite and nonnegative)."""
    rate = float(rate)
    if not (math.isfinite(rate) and rate >= 0.0):
        raise InvalidInputError(f"tempering rate must be >= 0, got {rate}")
    return rate


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_k = k * step`` on ``[0, t_final]``."""

    t_final: float
    n_steps: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t_final) and self.t_final > 0):
            raise InvalidInputError(f"t_final must be positive, got {self.t_final}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise InvalidInputError(f"n_steps must be a positive integer, got {self.n_steps}")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def step(self) -> float:
        return self.t_final / self.n_steps

    @property
    def nodes(self) -> np.ndarray:
        return self.step * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class SampledFunction:
    """Samples of a function on the nodes of a :class:`TimeGrid`."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size != self.grid.n_steps + 1:
            raise InvalidInputError(
                f"expected {self.grid.n_steps + 1} samples, got shape {values.shape}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, f: Callable[[np.ndarray], np.ndarray], grid: TimeGrid):
        return cls(grid, np.broadcast_to(f(grid.nodes), (grid.n_steps + 1,)))

    @property
    def times(self) -> np.ndarray:
        return self.grid.nodes


@dataclass(frozen=True)
class ConvolutionWeights:
    """Precomputed convolution coefficients for one fractional order."""

    order: float
    kind: Literal["GL", "L1"]
    coeffs: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.coeffs.size


def gl_weights(order: float, count: int) -> ConvolutionWeights:
    """First ``count`` Grünwald-Letnikov weights ``(-1)**k * binom(order, k)``.

    Built from the recurrence ``k * w[k] = (k - 1 - order) * w[k-1]``.
    """
    order = check_order(order)
    if int(count) != count or count < 1:
        raise InvalidInputError(f"count must be a positive integer, got {count}")
    w = np.empty(int(count))
    w[0] = 1.0
    for k in range(1, w.size):
        w[k] = w[k - 1] * (k - 1.0 - order) / k
    w.flags.writeable = False
    return ConvolutionWeights(order, "GL", w)


def l1_weights(order: float, count: int) -> ConvolutionWeights:
    """L1 coefficients ``(k + 1)**(1 - order) - k**(1 - order)``, k < count."""
    order = check_order(order)
    if int(count) != count or count < 1:
        raise InvalidInputError(f"count must be a positive integer, got {count}")
    k = np.arange(int(count), dtype=float)
    b = (k + 1.0) ** (1.0 - order) - k ** (1.0 - order)
    b.flags.writeable = False
    return ConvolutionWeights(order, "L1", b)


def _causal_convolve(kernel: np.ndarray, data: np.ndarray) -> np.ndarray:
    # out[n] = sum_{k=0}^{n} kernel[k] * data[n - k]
    return np.convolve(kernel, data)[: data.size]


# {{{ untempered schemes


def caputo_l1(f: SampledFunction, order: float) -> np.ndarray:
    """L1 approximation of the Caputo derivative at every node (0 at t_0)."""
    order = check_order(order)
    tau = f.grid.step
    b = l1_weights(order, f.grid.n_steps).coeffs
    out = np.zeros(f.values.size)
    out[1:] = _causal_convolve(b, np.diff(f.values))
    out[1:] *= tau ** (-order) / special.gamma(2.0 - order)
    return out


def riemann_liouville_gl(f: SampledFunction, order: float) -> np.ndarray:
    """Grünwald-Letnikov approximation of the Riemann-Liouville derivative.

    The value at ``t_0`` is the raw GL sum ``f(0) * step**-order``.
    """
    order = check_order(order)
    w = gl_weights(order, f.values.size).coeffs
    return f.grid.step ** (-order) * _causal_convolve(w, f.values)


def _integral_moments(order: float, rate: float, tau: float, count: int) -> np.ndarray:
    # exact integral of exp(-rate*s) * s**(order-1) / Gamma(order) over [m tau, (m+1) tau]
    edges = tau * np.arange(count + 1, dtype=float)
    if rate == 0.0:
        cdf = edges**order / special.gamma(order + 1.0)
    else:
        cdf = special.gammainc(order, rate * edges) / rate**order
    return np.diff(cdf)


def riemann_liouville_integral(f: SampledFunction, order: float) -> np.ndarray:
    """Product-integration approximation of the Riemann-Liouville integral."""
    order = check_order(order, allow_one=True)
    m = _integral_moments(order, 0.0, f.grid.step, f.grid.n_steps)
    out = np.zeros(f.values.size)
    out[1:] = _causal_convolve(m, f.values[1:])
    return out


# }}}


# {{{ tempered operators


def _check_samples(f: SampledFunction) -> None:
    if not isinstance(f, SampledFunction):
        raise InvalidInputError("expected a SampledFunction")
    if f.values.size < 2:
        raise InvalidInputError("need at least two samples")
    if not np.all(np.isfinite(f.values)):
        raise InvalidInputError("samples must be finite")


def _conjugation_safe(grid: TimeGrid, rate: float) -> bool:
    return rate * grid.t_final <= CONJUGATION_LIMIT


def tempered_caputo(f: SampledFunction, order: float, rate: float) -> SampledFunction:
    """Tempered Caputo derivative of ``f`` by the L1 scheme.

    Exact (up to rounding) whenever ``exp(rate * t) * f(t)`` is affine.
    """
    _check_samples(f)
    order, rate = check_order(order), check_rate(rate)
    if rate == 0.0:
        return SampledFunction(f.grid, caputo_l1(f, order))

    t = f.grid.nodes
    if _conjugation_safe(f.grid, rate):
        v = SampledFunction(f.grid, np.exp(rate * t) * f.values)
        return SampledFunction(f.grid, np.exp(-rate * t) * caputo_l1(v, order))

    # sum_k b_k (e^{-rate k tau} f_{n-k} - e^{-rate (k+1) tau} f_{n-k-1})
    tau = f.grid.step
    n = f.grid.n_steps
    b = l1_weights(order, n).coeffs
    decay = np.exp(-rate * tau * np.arange(n + 1))
    out = np.zeros(n + 1)
    out[1:] = _causal_convolve(b * decay[:-1], f.values[1:]) - _causal_convolve(
        b * decay[1:], f.values[:-1]
    )
    out[1:] *= tau ** (-order) / special.gamma(2.0 - order)
    return SampledFunction(f.grid, out)


def tempered_rl(f: SampledFunction, order: float, rate: float) -> SampledFunction:
    """Tempered Riemann-Liouville derivative of ``f`` by GL weights."""
    _check_samples(f)
    order, rate = check_order(order), check_rate(rate)
    if rate == 0.0:
        return SampledFunction(f.grid, riemann_liouville_gl(f, order))

    t = f.grid.nodes
    if _conjugation_safe(f.grid, rate):
        v = SampledFunction(f.grid, np.exp(rate * t) * f.values)
        return SampledFunction(f.grid, np.exp(-rate * t) * riemann_liouville_gl(v, order))

    w = gl_weights(order, f.values.size).coeffs
    w = w * np.exp(-rate * f.grid.step * np.arange(w.size))
    return SampledFunction(f.grid, f.grid.step ** (-order) * _causal_convolve(w, f.values))


def tempered_integral(f: SampledFunction, order: float, rate: float) -> SampledFunction:
    r"""Tempered Riemann-Liouville integral

    .. math::

        \frac{1}{\Gamma(\beta)} \int_0^t e^{-\mu (t - s)} (t - s)^{\beta - 1} f(s) \,\mathrm{d}s

    with the kernel integrated exactly over each cell and ``f`` frozen at the
    right endpoint of the cell. The value at ``t_0`` is 0.
    """
    _check_samples(f)
    order, rate = check_order(order, allow_one=True), check_rate(rate)
    if rate == 0.0:
        return SampledFunction(f.grid, riemann_liouville_integral(f, order))

    m = _integral_moments(order, rate, f.grid.step, f.grid.n_steps)
    out = np.zeros(f.values.size)
    out[1:] = _causal_convolve(m, f.values[1:])
    return SampledFunction(f.grid, out)


# }}}


# {{{ pointwise references


@functools.lru_cache(maxsize=64)
def _jacobi_rule(order: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    # nodes/weights for int_0^1 (1 - y)^(-order) h(y) dy
    x, w = special.roots_jacobi(n, -order, 0.0)
    y, w = 0.5 * (1.0 + x), w * 2.0 ** (order - 1.0)
    y.flags.writeable = False
    w.flags.writeable = False
    return y, w


def caputo_pointwise(
    f: Callable, df: Callable, t: float, order: float, rate: float, *, n_nodes: int = 64
) -> float:
    """Tempered Caputo derivative at a single time from the defining integral.

    ``f`` and its derivative ``df`` must be smooth vectorized callables. The
    weak singularity is absorbed into a Gauss-Jacobi rule.
    """
    order, rate = check_order(order), check_rate(rate)
    if t <= 0.0:
        return 0.0
    y, w = _jacobi_rule(order, n_nodes)
    s = t * y
    integrand = np.exp(-rate * t * (1.0 - y)) * (df(s) + rate * f(s))
    return float(t ** (1.0 - order) * np.dot(w, integrand) / special.gamma(1.0 - order))


def rl_pointwise(
    f: Callable, df: Callable, t: float, order: float, rate: float, *, n_nodes: int = 64
) -> float:
    """Tempered Riemann-Liouville derivative at a single time.

    Differentiates ``t**(1 - order) * J(t)`` analytically, where ``J`` is the
    rescaled convolution integral, so the outer ``d/dt`` of the definition is
    taken exactly.
    """
    order, rate = check_order(order), check_rate(rate)
    if t <= 0.0:
        raise InvalidInputError("the Riemann-Liouville derivative needs t > 0")
    y, w = _jacobi_rule(order, n_nodes)
    s = t * y
    damp = np.exp(-rate * t * (1.0 - y))
    fs = f(s)
    j0 = np.dot(w, damp * fs)
    j1 = np.dot(w, y * damp * (df(s) + rate * fs))
    value = (1.0 - order) * t ** (-order) * j0 + t ** (1.0 - order) * j1
    return float(value / special.gamma(1.0 - order))


# }}}

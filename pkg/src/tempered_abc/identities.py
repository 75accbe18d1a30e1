"""Numerical checks of the transform identities behind the boundary conditions.

These are the suites run by ``tempered-abc check-identities``: the Laplace
transforms of the tempered derivatives, the Talbot round trip, the
Parseval relation on a vertical line, the L1 Alikhanov inequality and the
positivity of ``Re((s + lam)**beta)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .calculus import SampledFunction, TimeGrid, caputo_pointwise, rl_pointwise
from .errors import InvalidInputError, WindowError
from .laplace import laplace_forward, laplace_of_samples, talbot_inverse
from .oracle import branch_real_parts
from .stability import alikhanov_check

IDENTITY_ORDERS = (0.3, 0.5, 0.8)
IDENTITY_RATES = (0.0, 0.5, 1.0)
IDENTITY_POINTS = (1.0, 2.0 + 3.0j, 5.0)


@dataclass(frozen=True)
class TransformCheck:
    order: float
    rate: float
    s: complex
    rl_error: float
    caputo_error: float


def derivative_transform_checks(orders=IDENTITY_ORDERS, rates=IDENTITY_RATES,
                                points=IDENTITY_POINTS, *, t_cut: float = 40.0) -> list[TransformCheck]:
    """Relative errors of both transform identities for ``f = e^{-lam t}(1 + t)``.

    The derivatives are evaluated pointwise from their defining integrals and
    transformed by quadrature; ``f_hat`` is transformed the same way.
    """
    results = []
    for order, rate in itertools.product(orders, rates):
        def f(t, rate=rate):
            return np.exp(-rate * t) * (1.0 + t)

        def df(t, rate=rate):
            return np.exp(-rate * t) * (1.0 - rate * (1.0 + t))

        def rl(t, order=order, rate=rate):
            return rl_pointwise(f, df, t, order, rate)

        def caputo(t, order=order, rate=rate):
            return caputo_pointwise(f, df, t, order, rate)

        for s in points:
            s = complex(s)
            f_hat = laplace_forward(lambda t: float(f(t)), s, t_cut)
            shifted = s + rate
            rl_expected = shifted**order * f_hat
            c_expected = rl_expected - shifted ** (order - 1.0) * float(f(0.0))
            rl_hat = laplace_forward(rl, s, t_cut)
            c_hat = laplace_forward(caputo, s, t_cut)
            results.append(TransformCheck(
                order, rate, s,
                abs(rl_hat - rl_expected) / abs(rl_expected),
                abs(c_hat - c_expected) / abs(c_expected),
            ))
    return results


def talbot_roundtrip(rates=(0.0, 0.5, 1.0, 2.0), times=None) -> float:
    """Largest error of inverting ``1/(s + a)`` against ``exp(-a t)``."""
    times = np.linspace(0.1, 5.0, 50) if times is None else times
    worst = 0.0
    for a in rates:
        for t in times:
            worst = max(worst, abs(talbot_inverse(lambda s, a=a: 1.0 / (s + a), t) - math.exp(-a * t)))
    return worst


def _choose_window(u: SampledFunction, v: SampledFunction, s0: float, level: float) -> float:
    z = 1.0
    while z < 1.0e12:
        pts = np.array([s0 + 1j * z, s0 - 1j * z])
        if max(np.abs(laplace_of_samples(u, pts)).max(), np.abs(laplace_of_samples(v, pts)).max()) < level:
            return z
        z *= 2.0
    return z


def parseval_spotcheck(u: SampledFunction, v: SampledFunction, s0: float, *,
                       z_window: float | None = None, n_nodes: int = 4001,
                       level: float = 1.0e-8, tail_rtol: float = 1.0e-5) -> float:
    """Relative discrepancy between the two sides of the Parseval relation.

    Left: ``int_{-Z}^{Z} u_hat(s0 + i z) v_hat(s0 - i z) dz`` by the trapezoidal
    rule in ``theta`` with ``z = s0 tan(theta)``; the transforms are exact for
    the piecewise-linear interpolants. Right: ``2 pi int e^{-2 s0 t} u v dt``
    by Simpson's rule. ``Z`` defaults to the first power of two where both
    transforms drop below ``level``.
    """
    if not (math.isfinite(s0) and s0 > 0.0):
        raise InvalidInputError(f"s0 must be positive, got {s0}")
    if u.grid != v.grid:
        raise InvalidInputError("u and v must share a time grid")

    t = u.grid.nodes
    right = 2.0 * math.pi * integrate.simpson(np.exp(-2.0 * s0 * t) * u.values * v.values, x=t)

    z_max = _choose_window(u, v, s0, level) if z_window is None else float(z_window)
    theta_max = math.atan(z_max / s0)
    theta = np.linspace(-theta_max, theta_max, n_nodes)
    z = s0 * np.tan(theta)
    jac = s0 / np.cos(theta) ** 2
    product = laplace_of_samples(u, s0 + 1j * z) * laplace_of_samples(v, s0 - 1j * z)
    left = integrate.trapezoid(product * jac, theta)

    # |u_hat v_hat| ~ C / z^2 at large z, so the two tails add about 2 |C| / Z
    tail = 2.0 * abs(product[-1]) * z_max
    scale = max(abs(left), abs(right))
    if scale == 0.0:
        return 0.0
    if tail > tail_rtol * scale:
        raise WindowError(f"frequency window Z={z_max:g} leaves a tail of {tail:.3e}")
    return float(abs(left - right) / scale)


def exponential_family(t_final: float = 30.0, n_steps: int = 6000):
    """``(u, v, s0)`` triples for the Parseval spot-check."""
    grid = TimeGrid(t_final, n_steps)
    e1 = SampledFunction.from_callable(lambda t: np.exp(-t), grid)
    e2 = SampledFunction.from_callable(lambda t: np.exp(-2.0 * t), grid)
    return [(e1, e1, 1.0), (e1, e2, 0.5), (e1, e2, 1.0), (e2, e2, 2.0)]


def random_trig_traces(count: int, *, seed: int = 0, n_steps: int = 200, t_final: float = 1.0,
                       n_terms: int = 5):
    """Random trigonometric polynomials sampled on ``[0, t_final]``."""
    rng = np.random.default_rng(seed)
    grid = TimeGrid(t_final, n_steps)
    t = grid.nodes
    traces = []
    for _ in range(count):
        k = np.arange(n_terms)[:, None]
        a, b = rng.normal(size=(2, n_terms, 1))
        omega = 2.0 * math.pi * rng.uniform(0.1, 3.0, size=(n_terms, 1))
        values = rng.normal() + (a * np.cos(omega * t) + b * np.sin(omega * t) / (1 + k)).sum(axis=0)
        traces.append(SampledFunction(grid, values))
    return traces


def alikhanov_suite(count: int = 100, orders=(0.25, 0.5, 0.75), *, seed: int = 0) -> int:
    """Number of ``(trace, order)`` pairs where the L1 Alikhanov inequality fails."""
    traces = random_trig_traces(count, seed=seed)
    return sum(not alikhanov_check(tr, a) for tr in traces for a in orders)


def branch_positivity(count: int = 1000, gammas=(0.1, 0.5, 0.9), lams=(0.0, 0.5, 1.0),
                      *, seed: int = 0) -> float:
    """Smallest ``Re((s + lam)**beta)`` over random ``s`` with ``Re(s) > 0``."""
    rng = np.random.default_rng(seed)
    # log-uniform real parts down to 1e-6, imaginary parts spread over many scales
    re = 10.0 ** rng.uniform(-6.0, 3.0, size=count)
    im = rng.choice([-1.0, 1.0], size=count) * 10.0 ** rng.uniform(-6.0, 6.0, size=count)
    s = re + 1j * im
    worst = math.inf
    for gamma, lam in itertools.product(gammas, lams):
        betas = (gamma / 2.0, 1.0 - gamma / 2.0, 1.0 - gamma)
        worst = min(worst, float(branch_real_parts(s, lam, betas).min()))
    return worst

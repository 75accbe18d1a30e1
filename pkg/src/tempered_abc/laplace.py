"""Numerical Laplace transform pair used to check transform identities.

``laplace_forward`` integrates a callable by adaptive quadrature,
``laplace_of_samples`` transforms the piecewise-linear interpolant of a
sampled signal exactly, and ``talbot_inverse`` inverts by the fixed Talbot
contour.
"""

from __future__ import annotations

import cmath
import math
import warnings
from typing import Callable

import numpy as np
from scipy import integrate

from .calculus import SampledFunction
from .errors import DivergenceError, InvalidInputError, TruncationWarning

#: Nodes on the Talbot contour.
TALBOT_NODES = 32


def check_laplace_point(s: complex) -> complex:
    """Reject points outside the half plane ``Re(s) > 0``."""
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)) or s.real <= 0.0:
        raise InvalidInputError(f"Laplace variable must satisfy Re(s) > 0, got {s}")
    return s


def laplace_forward(
    f: Callable[[float], float],
    s: complex,
    t_cut: float,
    *,
    tail_tol: float = 1.0e-12,
    epsrel: float = 1.0e-12,
) -> complex:
    """Approximate ``int_0^t_cut exp(-s t) f(t) dt``.

    A :class:`TruncationWarning` is issued when ``exp(-Re(s) t_cut) |f(t_cut)|``
    exceeds ``tail_tol``; the value is still returned.
    """
    s = check_laplace_point(s)
    if not t_cut > 0.0:
        raise InvalidInputError(f"t_cut must be positive, got {t_cut}")

    tail = math.exp(-s.real * t_cut) * abs(f(t_cut))
    if tail > tail_tol:
        warnings.warn(
            f"Laplace integrand at t_cut={t_cut} is {tail:.3e} > {tail_tol:.1e}",
            TruncationWarning,
            stacklevel=2,
        )

    def damped(t):
        return math.exp(-s.real * t) * f(t)

    opts = dict(epsabs=0.0, epsrel=epsrel, limit=500)
    w = s.imag
    # QAWO samples the endpoints, so an integrable singularity at t = 0 is
    # kept on a Gauss-Kronrod piece that never touches t = 0
    t_mid = min(1.0, t_cut)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if w == 0.0:
            re, _ = integrate.quad(damped, 0.0, t_cut, **opts)
            return complex(re, 0.0)
        re, _ = integrate.quad(lambda t: damped(t) * math.cos(w * t), 0.0, t_mid, **opts)
        im, _ = integrate.quad(lambda t: damped(t) * math.sin(w * t), 0.0, t_mid, **opts)
        if t_cut > t_mid:
            re += integrate.quad(damped, t_mid, t_cut, weight="cos", wvar=w, **opts)[0]
            im += integrate.quad(damped, t_mid, t_cut, weight="sin", wvar=w, **opts)[0]
    return complex(re, -im)


def laplace_of_samples(f: SampledFunction, s) -> np.ndarray:
    """Exact Laplace transform of the piecewise-linear interpolant of ``f``.

    The interpolant is taken to vanish for ``t > t_final``. ``s`` may be an
    array of points with positive real part.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s.real <= 0.0):
        raise InvalidInputError("Laplace variable must satisfy Re(s) > 0")

    t = f.grid.nodes
    tau = f.grid.step
    u = f.values
    slopes = np.diff(u) / tau
    out = np.empty(s.shape, dtype=complex)
    # integration by parts: [u0 - uN e^{-sT}]/s + sum_k m_k e^{-s t_k} (1 - e^{-s tau}) / s^2
    chunk = max(1, 2_000_000 // t.size)
    flat_s, flat_out = s.ravel(), out.ravel()
    for i in range(0, flat_s.size, chunk):
        si = flat_s[i : i + chunk, None]
        phases = np.exp(-si * t[None, :-1])
        ramp = (phases @ slopes) * (-np.expm1(-si[:, 0] * tau)) / si[:, 0] ** 2
        ends = (u[0] - u[-1] * np.exp(-si[:, 0] * t[-1])) / si[:, 0]
        flat_out[i : i + chunk] = ends + ramp
    return out


def talbot_inverse(g_hat: Callable[[complex], complex], t: float, n_nodes: int = TALBOT_NODES) -> float:
    """Invert a Laplace transform at ``t > 0`` on the fixed Talbot contour.

    Contour ``s(theta) = r theta (cot theta + i)`` with ``r = 2 M / (5 t)``.
    """
    t = float(t)
    if not t > 0.0:
        raise InvalidInputError(f"Talbot inversion needs t > 0, got {t}")

    m = n_nodes
    r = 2.0 * m / (5.0 * t)
    total = 0.5 * (complex(g_hat(complex(r))) * math.exp(r * t)).real
    for k in range(1, m):
        theta = k * math.pi / m
        cot = math.cos(theta) / math.sin(theta)
        s = r * theta * complex(cot, 1.0)
        sigma = theta + (theta * cot - 1.0) * cot
        total += (cmath.exp(t * s) * complex(g_hat(s)) * complex(1.0, sigma)).real
    value = r / m * total
    if not math.isfinite(value):
        raise DivergenceError(f"Talbot sum is not finite at t={t}")
    return value

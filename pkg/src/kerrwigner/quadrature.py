"""Tensor Gauss-Legendre quadrature over a square in the complex plane."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import QuadratureError


@lru_cache(maxsize=32)
def _nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def integrate_square(f, half_width: float, center: complex = 0.0, n: int = 64):
    """Integrate ``f(beta)`` over the square |Re(beta - c)|, |Im(beta - c)| <= L.

    ``f`` receives a 2-D complex array of nodes and returns an array whose
    last two axes match it; leading axes are integrated independently.
    The measure is d^2 beta = d(Re beta) d(Im beta).
    """
    x, w = _nodes(n)
    u = half_width * x
    beta = (center.real + u)[:, None] + 1j * (center.imag + u)[None, :]
    vals = np.asarray(f(beta))
    weights = (half_width ** 2) * np.outer(w, w)
    return np.tensordot(vals, weights, axes=([-2, -1], [0, 1]))


def integrate_adaptive(f, half_width: float, center: complex = 0.0, tol: float = 1e-10,
                       n0: int = 32, max_nodes: int = 1024):
    """Node-doubling Gauss-Legendre on a square.

    Doubles the node count per axis until two successive estimates agree to
    ``tol / 10`` (relative to ``max(1, |estimate|)``).  Returns
    ``(estimate, error_estimate)``.
    """
    n = n0
    prev = integrate_square(f, half_width, center, n)
    diff = np.inf
    while n * 2 <= max_nodes:
        n *= 2
        cur = integrate_square(f, half_width, center, n)
        diff = np.abs(cur - prev)
        if np.all(diff <= tol / 10 * np.maximum(1.0, np.abs(cur))):
            return cur, float(np.max(diff))
        prev = cur
    raise QuadratureError(
        f"quadrature did not reach tol={tol:g} with {n} nodes per axis",
        estimate=prev, error=float(np.max(diff)),
    )

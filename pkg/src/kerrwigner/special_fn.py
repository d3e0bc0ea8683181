"""Two-variable Hermite and Laguerre polynomials over complex arguments.

H_{m,n}(x, y) is generated by exp(-t t' + x t + y t').  Everything here is
evaluated by recurrence; the factorial-normalised form

    h_{m,n}(x, y) = H_{m,n}(x, y) / sqrt(m! n!)

is the one the rest of the package works with, because the series it feeds
divide by m! n! anyway and h stays bounded where H overflows.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import DomainError, ScalingRequiredError

_OVERFLOW_LIMIT = 1e300


def log_factorials(n: int) -> np.ndarray:
    """``out[k] = log(k!)`` for ``k = 0..n``."""
    out = np.zeros(n + 1)
    if n > 0:
        out[1:] = np.cumsum(np.log(np.arange(1, n + 1, dtype=float)))
    return out


def _normalised_laguerre(max_j: int, max_a: int, u) -> np.ndarray:
    """``out[j, a] = (-1)^j L_j^{(a)}(u) / sqrt(C(j + a, j))``.

    With this normalisation h_{j+a, j}(x, y) = x^a / sqrt(a!) * out[j, a] and
    h_{j, j+a}(x, y) = y^a / sqrt(a!) * out[j, a], u = x y.  The forward
    recurrence in j is stable, unlike the two-index Hermite recurrence, which
    loses all accuracy for large real x y.
    """
    u = np.asarray(u, dtype=complex)
    a = np.arange(max_a + 1, dtype=float).reshape((-1,) + (1,) * u.ndim)
    out = np.empty((max_j + 1, max_a + 1) + u.shape, dtype=complex)
    out[0] = 1.0
    if max_j >= 1:
        out[1] = (u - 1.0 - a) / np.sqrt(1.0 + a)
    for j in range(1, max_j):
        out[j + 1] = -((2 * j + 1 + a - u) * out[j] + np.sqrt(j * (j + a)) * out[j - 1]) \
            / np.sqrt((j + 1) * (j + 1 + a))
    return out


def _edges(w: np.ndarray, max_a: int, log_seed=None) -> np.ndarray:
    """``out[a] = seed * w^a / sqrt(a!)``, evaluated in log form."""
    out = np.empty((max_a + 1,) + w.shape, dtype=complex)
    out[0] = 1.0 if log_seed is None else np.exp(log_seed)
    with np.errstate(divide="ignore", invalid="ignore"):
        logw = np.log(w)
    base = 0.0 if log_seed is None else log_seed
    for a in range(1, max_a + 1):
        with np.errstate(invalid="ignore"):
            val = np.exp(base + a * logw - 0.5 * math.lgamma(a + 1))
        out[a] = np.where(w == 0, 0.0, val)
    return out


def hermite_table(max_m: int, max_n: int, x, y, scaled: bool = True) -> np.ndarray:
    """Table of H_{i,j}(x, y) (or h_{i,j} when ``scaled``) for i <= max_m, j <= max_n.

    ``x`` and ``y`` may be arrays of a common shape; the result has shape
    ``(max_m + 1, max_n + 1) + shape``.  Entries are assembled from
    normalised associated-Laguerre values along each diagonal m - n = const.
    """
    if max_m < 0 or max_n < 0:
        raise DomainError("Hermite orders must be non-negative")
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    x, y = np.broadcast_arrays(x, y)
    A = max(max_m, max_n)
    G = _normalised_laguerre(min(max_m, max_n), A, x * y)
    ex = _edges(x, max_m)
    ey = _edges(y, max_n)
    out = np.empty((max_m + 1, max_n + 1) + x.shape, dtype=complex)
    for d in range(-max_n, max_m + 1):
        a = abs(d)
        count = min(max_m - d, max_n) + 1 if d >= 0 else min(max_m, max_n + d) + 1
        j = np.arange(count)
        edge = ex[a] if d >= 0 else ey[a]
        if d >= 0:
            out[j + a, j] = edge * G[:count, a]
        else:
            out[j, j + a] = edge * G[:count, a]
    if not scaled:
        lf = log_factorials(max(max_m, max_n))
        with np.errstate(over="ignore", invalid="ignore"):
            fac = np.exp(0.5 * (lf[:max_m + 1, None] + lf[None, :max_n + 1]))
            out *= fac.reshape(fac.shape + (1,) * x.ndim)
    return out


def hermite2(m: int, n: int, x: complex, y: complex) -> complex:
    """H_{m,n}(x, y) by the two-index recurrence.

    Raises ScalingRequiredError when the value leaves the double range.
    """
    if m < 0 or n < 0:
        raise DomainError(f"Hermite orders must be non-negative, got ({m}, {n})")
    with np.errstate(over="ignore", invalid="ignore"):
        table = hermite_table(m, n, x, y, scaled=False)
    value = complex(table[m, n])
    finite = np.all(np.isfinite(table))
    if not finite or abs(value) > _OVERFLOW_LIMIT:
        raise ScalingRequiredError(
            f"H_{{{m},{n}}} overflows double precision; use hermite2_scaled"
        )
    return value


def hermite2_scaled(m: int, n: int, x: complex, y: complex) -> complex:
    """H_{m,n}(x, y) / sqrt(m! n!) via the factorial-normalised recurrence."""
    if m < 0 or n < 0:
        raise DomainError(f"Hermite orders must be non-negative, got ({m}, {n})")
    return complex(hermite_table(m, n, x, y, scaled=True)[m, n])


def scaled_antidiagonals(x, y, seed=1.0) -> Iterator[np.ndarray]:
    """Yield successive anti-diagonals of the scaled Hermite table.

    The k-th yielded array has shape ``(k + 1,) + shape`` with entry ``i``
    equal to ``seed * h_{i, k-i}(x, y)``.  Memory stays O(k) per point.
    Half of sqrt(seed) rides on the Laguerre part and half on the power
    part, which keeps both factors in range for large |x y|.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    x, y = np.broadcast_arrays(x, y)
    seed = np.broadcast_to(np.asarray(seed, dtype=complex), x.shape)
    with np.errstate(divide="ignore"):
        half = 0.5 * np.log(seed)
    root = np.exp(half)
    u = x * y
    with np.errstate(divide="ignore", invalid="ignore"):
        logx, logy = np.log(x), np.log(y)
    ex = [root]
    ey = [root]
    # per parity of a: normalised Laguerre states (previous, current), their j and a
    state = {0: None, 1: None}
    k = 0
    while True:
        p = k % 2
        st = state[p]
        new = np.broadcast_to(np.asarray(root), (1,) + x.shape).astype(complex)
        if st is None:
            prev, cur, j, a = np.zeros_like(new), new, np.zeros(1), np.array([float(k)])
        else:
            prev, cur, j, a = st
            shape = (-1,) + (1,) * x.ndim
            jj, aa = j.reshape(shape), a.reshape(shape)
            nxt = -((2 * jj + 1 + aa - u) * cur + np.sqrt(jj * (jj + aa)) * prev) \
                / np.sqrt((jj + 1) * (jj + 1 + aa))
            prev = np.concatenate([cur, np.zeros_like(new)])
            cur = np.concatenate([nxt, new])
            j = np.append(j + 1, 0.0)
            a = np.append(a, float(k))
        state[p] = (prev, cur, j, a)
        if k > 0:
            lg = 0.5 * math.lgamma(k + 1)
            with np.errstate(invalid="ignore"):
                ex.append(np.where(x == 0, 0.0, np.exp(half + k * logx - lg)))
                ey.append(np.where(y == 0, 0.0, np.exp(half + k * logy - lg)))
        out = np.empty((k + 1,) + x.shape, dtype=complex)
        for i in range(k + 1):
            d = 2 * i - k
            idx = abs(d) // 2
            out[i] = (ex[d] if d >= 0 else ey[-d]) * cur[idx]
        yield out
        k += 1


@dataclass(frozen=True)
class HermiteTable:
    max_order: int
    x: complex
    y: complex
    values: np.ndarray
    scaled: bool = True

    @classmethod
    def build(cls, max_order: int, x: complex, y: complex, scaled: bool = True):
        values = hermite_table(max_order, max_order, complex(x), complex(y), scaled)
        values.setflags(write=False)
        return cls(max_order, complex(x), complex(y), values, scaled)

    def __getitem__(self, idx):
        return self.values[idx]

    def unscaled(self, m: int, n: int) -> complex:
        v = self.values[m, n]
        if not self.scaled:
            return complex(v)
        lf = math.lgamma(m + 1) + math.lgamma(n + 1)
        return complex(v * math.exp(0.5 * lf))


def laguerre(n: int, u):
    """L_n(u) by the three-term recurrence.  Accepts scalar or array ``u``."""
    return genlaguerre(n, 0, u)


def genlaguerre(n: int, a: int, u):
    """Associated Laguerre polynomial L_n^{(a)}(u)."""
    if n < 0:
        raise DomainError("Laguerre degree must be non-negative")
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=complex if np.iscomplexobj(u) else float)
    prev = np.zeros_like(u)
    cur = np.ones_like(u)
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 + a - u) * cur - (k + a) * prev) / (k + 1)
    return cur.item() if scalar else cur


def genlaguerre_table(max_n: int, max_a: int, u) -> np.ndarray:
    """``out[j, a] = L_j^{(a)}(u)`` for j <= max_n, a <= max_a (vectorised in u)."""
    u = np.asarray(u, dtype=float)
    a = np.arange(max_a + 1, dtype=float).reshape((-1,) + (1,) * u.ndim)
    out = np.empty((max_n + 1, max_a + 1) + u.shape)
    out[0] = 1.0
    if max_n >= 1:
        out[1] = 1.0 + a - u
    for j in range(1, max_n):
        out[j + 1] = ((2 * j + 1 + a - u) * out[j] - (j + a) * out[j - 1]) / (j + 1)
    return out


def _principal_sqrt_checked(w: complex, what: str) -> complex:
    if w.real <= 0:
        raise DomainError(f"{what} = {w} is outside the right half-plane; branch undefined")
    return cmath.sqrt(w)


def hermite_diagonal_sum(z: complex, m: int, n: int, x: complex, y: complex) -> complex:
    """Closed form of sum_l z^l / l! * H_{m+l,n+l}(x, y)."""
    w = complex(z) + 1.0
    r = _principal_sqrt_checked(w, "z + 1")
    pref = cmath.exp(z * x * y / w - 0.5 * (m + n + 2) * cmath.log(w))
    if m + n <= 150:
        try:
            return pref * hermite2(m, n, x / r, y / r)
        except ScalingRequiredError:
            pass
    lf = math.lgamma(m + 1) + math.lgamma(n + 1)
    return pref * hermite2_scaled(m, n, x / r, y / r) * math.exp(0.5 * lf)


def hermite_bilinear_sum(s: complex, t: complex, x: complex, y: complex,
                         a: complex, b: complex) -> complex:
    """Closed form of sum_{m,n} s^m t^n / (m! n!) H_{m,n}(x, y) H_{m,n}(a, b)."""
    st = s * t
    if abs(st) >= 1:
        raise DomainError(f"|s t| = {abs(st)} must be < 1")
    d = 1.0 - st
    return cmath.exp((s * x * a + t * y * b - (x * y + a * b) * st) / d) / d


def sum_until_converged(term: Callable[[int], complex], max_terms: int = 100000,
                        rel: float = 1e-16, run: int = 10) -> complex:
    """Sum ``term(0) + term(1) + ...`` until ``run`` consecutive terms are negligible.

    A term is negligible when its magnitude is below ``rel * (|sum| + 1e-300)``.
    Used for the brute-force oracles in the test suite.
    """
    total = 0j
    quiet = 0
    for k in range(max_terms):
        v = term(k)
        total += v
        if abs(v) < rel * (abs(total) + 1e-300):
            quiet += 1
            if quiet >= run:
                return total
        else:
            quiet = 0
    raise DomainError(f"series did not converge within {max_terms} terms")

"""Photon-number distributions after the channel.

Only the diagonal of rho(t) matters here, and the Kerr phases cancel on the
diagonal, so every distribution in this module is independent of chi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .channel import ChannelParams, DensityMatrix
from .errors import DomainError, ValidationError
from .quadrature import integrate_adaptive
from .special_fn import hermite_table, laguerre
from .wigner import Coherent, InitialState, Number, initial_wigner, support_radius


@dataclass(frozen=True)
class PnDistribution:
    probs: np.ndarray = field(repr=False)
    tail: float = 0.0

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def mean(self) -> float:
        return float(np.dot(np.arange(self.probs.size), self.probs))

    def check(self, atol: float = 1e-6) -> "PnDistribution":
        if np.any(self.probs < -1e-10) or np.any(self.probs > 1 + 1e-10):
            raise ValidationError("probabilities outside [0, 1]")
        total = self.probs.sum() + self.tail
        if abs(total - 1.0) > atol:
            raise ValidationError(f"probabilities plus tail sum to {total!r}")
        return self


def pn_from_density(rho: DensityMatrix) -> PnDistribution:
    diag = np.diag(rho.data)
    if np.any(np.abs(diag.imag) > 1e-10):
        raise ValidationError("density matrix has complex diagonal entries")
    probs = diag.real.copy()
    return PnDistribution(probs, float(1.0 - probs.sum()))


def pn_overlap(source: InitialState, s: int, params: ChannelParams, tol: float = 1e-12) -> float:
    """p(s) as an overlap integral with the initial Wigner function.

    p(s) = 4 (-1)^s e^{2 gt} / (2 e^{2 gt} - 1)^{s+1}
           * int d^2b exp(-2|b|^2 / (2 e^{2 gt} - 1)) L_s(4 e^{2 gt} |b|^2 / (2 e^{2 gt} - 1)) W(b, 0)

    chi does not appear, so the result is chi-independent by construction.
    """
    if s < 0:
        raise DomainError("photon number must be non-negative")
    g = math.exp(2.0 * params.gamma_t)
    q = 2.0 * g - 1.0
    w0 = initial_wigner(source)
    # the weight widens with gamma t; its Gaussian reach must fit in the window
    half = max(support_radius(source), math.sqrt(q * (s + 1))) + 6.0 / math.sqrt(2.0)
    log_pref = math.log(4.0) + 2.0 * params.gamma_t - (s + 1) * math.log(q)
    sign = -1.0 if s % 2 else 1.0

    def integrand(beta):
        r2 = np.abs(beta) ** 2
        return np.exp(-2.0 * r2 / q) * laguerre(s, 4.0 * g * r2 / q) * w0(beta)

    val, _ = integrate_adaptive(integrand, half, tol=tol)
    return float(sign * math.exp(log_pref) * np.real(val))


def pn_overlap_distribution(source: InitialState, params: ChannelParams, n_max: int,
                            tol: float = 1e-12) -> PnDistribution:
    probs = np.array([pn_overlap(source, s, params, tol) for s in range(n_max + 1)])
    return PnDistribution(probs, float(1.0 - probs.sum()))


def coherent_pn(z: complex, params: ChannelParams, n_max: int) -> PnDistribution:
    """Poisson law with mean |z|^2 e^{-2 gamma t} (closed form of the overlap integral)."""
    mu = abs(complex(z)) ** 2 * params.transmission
    probs = stats.poisson.pmf(np.arange(n_max + 1), mu)
    return PnDistribution(probs, float(stats.poisson.sf(n_max, mu)))


def number_pn(s: int, params: ChannelParams, n_max: int | None = None) -> PnDistribution:
    """Binomial law B(s, e^{-2 gamma t}) for an initial number state."""
    n_max = s if n_max is None else n_max
    probs = stats.binom.pmf(np.arange(n_max + 1), s, params.transmission)
    return PnDistribution(probs, float(max(0.0, 1.0 - probs.sum())))


def closed_form_pn(source: InitialState, params: ChannelParams, n_max: int) -> PnDistribution:
    if isinstance(source, Coherent):
        return coherent_pn(source.z, params, n_max)
    if isinstance(source, Number):
        return number_pn(source.s, params, n_max)
    raise DomainError("closed form available for coherent and number states only")


def f_overlap_check(m: int, n: int, s: int, tol: float = 1e-12) -> complex:
    """Quadrature of int d^2a e^{-2|a|^2} W_s(a) H_mn(2a*, 2a); equals s!/4 when m = n = s, else 0."""
    if min(m, n, s) < 0:
        raise DomainError("indices must be non-negative")
    w_s = initial_wigner(Number(s))
    lf = 0.5 * (math.lgamma(m + 1) + math.lgamma(n + 1))

    def integrand(alpha):
        h = hermite_table(m, n, 2 * np.conj(alpha), 2 * alpha, scaled=True)[m, n]
        return np.exp(-2.0 * np.abs(alpha) ** 2) * w_s(alpha) * h

    radius = math.sqrt(max(m, n, s) + 1.0)
    val, _ = integrate_adaptive(integrand, radius + 6.0 / math.sqrt(2.0), tol=tol)
    return complex(val) * math.exp(lf)

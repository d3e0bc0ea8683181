"""Kerr + photon-loss channel on a truncated Fock space.

The channel solves

    d rho/dt = -i chi [(a^dag a)^2, rho] + gamma (2 a rho a^dag - a^dag a rho - rho a^dag a)

in closed form as an operator sum over lost quanta l:

    rho_mn(t) = exp(-i chi t (m^2 - n^2) - gamma t (m + n))
                * sum_l Lambda_mn^l / l! * sqrt((m+l)! (n+l)! / (m! n!)) * rho0_{m+l, n+l}

with the complex damping coefficient
Lambda_mn = gamma (1 - exp(-2t(gamma + i chi (m - n)))) / (gamma + i chi (m - n)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import stats

from .errors import DimensionError, DomainError, TruncationError, ValidationError
from .special_fn import log_factorials

DEFAULT_N_CUT = 32
COHERENT_TAIL = 1e-12


@dataclass(frozen=True)
class ChannelParams:
    chi: float
    gamma: float
    t: float

    def __post_init__(self):
        for name in ("chi", "gamma", "t"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
        if self.gamma < 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")
        if self.t < 0:
            raise DomainError(f"t must be >= 0, got {self.t}")

    @classmethod
    def from_products(cls, chi_t: float, gamma_t: float) -> "ChannelParams":
        """Channel specified by the dimensionless pair (chi t, gamma t); t is set to 1."""
        return cls(chi=float(chi_t), gamma=float(gamma_t), t=1.0)

    @property
    def chi_t(self) -> float:
        return self.chi * self.t

    @property
    def gamma_t(self) -> float:
        return self.gamma * self.t

    @property
    def transmission(self) -> float:
        """Surviving-photon probability exp(-2 gamma t)."""
        return math.exp(-2.0 * self.gamma_t)

    def kerr_angle(self) -> float:
        """chi t reduced mod 2 pi.

        Every Kerr phase is exp(-i chi t k) with integer k, so the reduction is
        exact and keeps the phases accurate at large photon numbers.
        """
        return math.fmod(self.chi_t, 2.0 * math.pi)

    def as_dict(self) -> dict:
        return {"chi": self.chi, "gamma": self.gamma, "t": self.t}


def _lambda_from_diff(d, params: ChannelParams):
    """Lambda as a function of the index difference d = m - n (array-friendly)."""
    d = np.asarray(d, dtype=float)
    if params.gamma == 0.0 or params.t == 0.0:
        return np.zeros(d.shape, dtype=complex)
    rate = params.gamma + 1j * params.chi * d
    w = 2.0 * params.t * rate
    # gamma (1 - e^{-w}) / rate = 2 gamma t (1 - e^{-w}) / w, series for tiny |w|
    small = np.abs(w) < 1e-8
    safe = np.where(small, 1.0, w)
    phi = np.where(small, 1.0 - 0.5 * w, -np.expm1(-safe) / safe)
    return 2.0 * params.gamma_t * phi


def lambda_coeff(m: int, n: int, params: ChannelParams) -> complex:
    if m < 0 or n < 0:
        raise DomainError("Fock indices must be non-negative")
    if params.gamma == 0.0:
        return 0j
    # m = n carries no Kerr dependence; use the exact real expression
    if m == n:
        return complex(-math.expm1(-2.0 * params.gamma_t))
    return complex(_lambda_from_diff(m - n, params))


@dataclass(frozen=True)
class LambdaTable:
    n_cut: int
    params: ChannelParams
    values: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, n_cut: int, params: ChannelParams) -> "LambdaTable":
        idx = np.arange(n_cut)
        d = idx[:, None] - idx[None, :]
        vals = _lambda_from_diff(d, params)
        np.fill_diagonal(vals, lambda_coeff(0, 0, params))
        if np.any((vals + 1.0).real <= 0):
            raise DomainError("Lambda + 1 left the right half-plane")
        vals.setflags(write=False)
        return cls(n_cut, params, vals)


@dataclass(frozen=True)
class DensityMatrix:
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.data, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValidationError(f"density matrix must be square, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def n_cut(self) -> int:
        return self.data.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.data + self.data.conj().T)
        return float(np.linalg.eigvalsh(h)[0])

    def validate(self, herm_tol: float = 1e-12, trace_tail: float = 1e-6,
                 psd_tol: float = 1e-10) -> "DensityMatrix":
        err = self.hermiticity_error()
        if err > herm_tol:
            raise ValidationError(f"density matrix is not Hermitian (max deviation {err:.3g})")
        tr = self.trace().real
        if not (1.0 - trace_tail <= tr <= 1.0 + 1e-12):
            raise ValidationError(f"trace {tr!r} outside [1 - {trace_tail:g}, 1 + 1e-12]")
        ev = self.min_eigenvalue()
        if ev < -psd_tol:
            raise ValidationError(f"density matrix has negative eigenvalue {ev:.3g}")
        return self

    def embed(self, n_cut: int) -> "DensityMatrix":
        """Zero-pad (or crop) to dimension ``n_cut``."""
        out = np.zeros((n_cut, n_cut), dtype=complex)
        k = min(n_cut, self.n_cut)
        out[:k, :k] = self.data[:k, :k]
        return DensityMatrix(out)

    @classmethod
    def fock(cls, s: int, n_cut: int | None = None) -> "DensityMatrix":
        if s < 0:
            raise DomainError("photon number must be non-negative")
        n_cut = max(n_cut or DEFAULT_N_CUT, s + 1)
        out = np.zeros((n_cut, n_cut), dtype=complex)
        out[s, s] = 1.0
        return cls(out)

    @classmethod
    def coherent(cls, z: complex, n_cut: int | None = None) -> "DensityMatrix":
        n_cut = n_cut or coherent_cutoff(z)
        psi = coherent_amplitudes(z, n_cut)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def random(cls, n_cut: int, rank: int | None = None, seed: int = 0) -> "DensityMatrix":
        """Random mixed state from a Ginibre matrix (reproducible via ``seed``)."""
        rng = np.random.default_rng(seed)
        rank = rank or n_cut
        g = rng.normal(size=(n_cut, rank)) + 1j * rng.normal(size=(n_cut, rank))
        rho = g @ g.conj().T
        rho = 0.5 * (rho + rho.conj().T)
        return cls(rho / np.trace(rho).real)


def coherent_amplitudes(z: complex, n_cut: int) -> np.ndarray:
    """<k|z> for k < n_cut."""
    z = complex(z)
    k = np.arange(n_cut)
    out = np.zeros(n_cut, dtype=complex)
    if z == 0:
        out[0] = 1.0
        return out
    lf = log_factorials(n_cut - 1)
    logmag = -0.5 * abs(z) ** 2 + k * math.log(abs(z)) - 0.5 * lf
    return np.exp(logmag + 1j * k * np.angle(z))


def coherent_cutoff(z: complex, tail: float = COHERENT_TAIL, minimum: int = DEFAULT_N_CUT) -> int:
    """Smallest n_cut >= minimum whose Poisson tail P(k >= n_cut) is below ``tail``."""
    mu = abs(complex(z)) ** 2
    n = minimum
    while stats.poisson.sf(n - 1, mu) >= tail:
        n += 1
    return n


def _log_lambda(lam: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(lam.astype(complex))


def evolve_density(rho0: DensityMatrix, params: ChannelParams, l_max: int | None = None,
                   tol: float = 1e-12) -> DensityMatrix:
    """Closed-form channel output on the truncated Fock space.

    ``l_max`` caps the number of lost quanta (default: n_cut - 1, which makes
    the sum exact on the truncated space).  If the omitted part of the sum
    carries more than ``tol`` of trace, TruncationError is raised with the
    estimate attached.
    """
    N = rho0.n_cut
    if l_max is None:
        l_max = N - 1
    if l_max < 0:
        raise DomainError("l_max must be >= 0")
    lam = LambdaTable.build(N, params).values
    lf = log_factorials(2 * N)
    idx = np.arange(N)
    loglam = _log_lambda(lam)
    src = rho0.data

    tail = _trace_tail(src, lam[0, 0].real, l_max, lf)
    if tail > tol:
        raise TruncationError(f"l-sum truncated at l_max={l_max} drops {tail:.3g} of trace", tail)

    acc = src.copy()  # l = 0 term
    if params.gamma_t > 0:
        for l in range(1, min(l_max, N - 1) + 1):
            k = N - l  # output entries with m, n < k receive a contribution
            m = idx[:k, None]
            n = idx[None, :k]
            with np.errstate(invalid="ignore"):
                logc = (l * loglam[:k, :k] - lf[l]
                        + 0.5 * (lf[m + l] + lf[n + l] - lf[m] - lf[n]))
            # Lambda can underflow to 0 for subnormal gamma t; those terms vanish
            coef = np.where(lam[:k, :k] == 0, 0.0, np.exp(logc))
            acc[:k, :k] += coef * src[l:, l:]

    theta = params.kerr_angle()
    sq = (idx ** 2).astype(float)
    phase = np.exp(-1j * theta * (sq[:, None] - sq[None, :])
                   - params.gamma_t * (idx[:, None] + idx[None, :]))
    out = phase * acc
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out)


def _trace_tail(src: np.ndarray, lam_diag: float, l_max: int, lf: np.ndarray) -> float:
    """Trace weight of the terms with l > l_max (zero when nothing is omitted)."""
    N = src.shape[0]
    if l_max >= N - 1 or lam_diag == 0.0:
        return 0.0
    diag = np.abs(np.diag(src))
    total = 0.0
    for m in range(N):
        for l in range(l_max + 1, N - m):
            total += math.exp(l * math.log(lam_diag) - lf[l] + lf[m + l] - lf[m]) * diag[m + l]
    return total


@lru_cache(maxsize=256)
def _lower(l: int, n_cut: int) -> np.ndarray:
    """Matrix of a^l on the truncated space."""
    a = np.diag(np.sqrt(np.arange(1, n_cut, dtype=float)), 1).astype(complex)
    out = np.linalg.matrix_power(a, l)
    out.setflags(write=False)
    return out


def kraus_pair(m: int, n: int, l: int, params: ChannelParams, n_cut: int):
    """Generalised Kraus pair (M_{m,n,l}, Mdag_{m,n,l}) as dense matrices.

    M = sqrt(Lambda_mn^l / l!) e^{-i chi t m^2 - gamma t m} |m><m| a^l and the
    right-hand factor is the Hermitian conjugate of the same construction with
    (m, n) exchanged.  The dagger acts on the scalar prefactor too, which is
    what makes sum M rho Mdag reproduce the closed-form evolution.
    """
    if min(m, n, l) < 0:
        raise DomainError("Kraus indices must be non-negative")
    if m >= n_cut or n >= n_cut:
        raise DimensionError(f"indices ({m}, {n}) exceed n_cut={n_cut}")
    al = _lower(l, n_cut)

    def one_sided(p: int, q: int) -> np.ndarray:
        lam = lambda_coeff(p, q, params)
        if l == 0:
            amp = 1.0 + 0j
        elif lam == 0:
            amp = 0j
        else:
            amp = np.exp(0.5 * (l * np.log(lam) - math.lgamma(l + 1)))
        theta = params.kerr_angle()
        amp *= np.exp(-1j * theta * p * p - params.gamma_t * p)
        op = np.zeros((n_cut, n_cut), dtype=complex)
        op[p, :] = amp * al[p, :]
        return op

    M = one_sided(m, n)
    Mdag = one_sided(n, m).conj().T
    return M, Mdag


def kraus_sandwich(rho0: DensityMatrix, params: ChannelParams, l_max: int | None = None) -> DensityMatrix:
    """sum_{m,n,l} M rho0 Mdag built from explicit Kraus matrices (small N only)."""
    N = rho0.n_cut
    l_max = N - 1 if l_max is None else l_max
    out = np.zeros((N, N), dtype=complex)
    for l in range(l_max + 1):
        for m in range(N):
            for n in range(N):
                M, Md = kraus_pair(m, n, l, params, N)
                out += M @ rho0.data @ Md
    return DensityMatrix(out)


def normalization_defect(params: ChannelParams, n_cut: int, l_max: int) -> float:
    """max |sum Mdag M - I| over the indices the l-cutoff leaves intact.

    On the truncated space the (k, k) entry of sum Mdag M is a binomial sum
    over l <= min(k, l_max), so it is complete exactly for k <= l_max.
    """
    if n_cut < 1:
        raise DomainError("n_cut must be >= 1")
    total = np.zeros((n_cut, n_cut), dtype=complex)
    for l in range(l_max + 1):
        for m in range(n_cut):
            for n in range(n_cut):
                M, Md = kraus_pair(m, n, l, params, n_cut)
                total += Md @ M
    k = min(n_cut, l_max + 1)
    return float(np.max(np.abs(total[:k, :k] - np.eye(k))))

"""Brute-force reference computations.

Nothing here touches the closed-form paths in ``channel`` or ``wigner``:
the master equation is integrated directly with RK4, and moment integrals
are done by plain quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, DensityMatrix
from .errors import DomainError, IntegratorError
from .quadrature import integrate_adaptive
from .special_fn import hermite_table

STABILITY_LIMIT = 0.1


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    n_cut: int
    tol: float = 1e-9

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.n_cut < 1:
            raise DomainError("n_cut must be >= 1")

    def stiffness(self, params: ChannelParams) -> float:
        return self.dt * (params.gamma * self.n_cut + abs(params.chi) * self.n_cut ** 2)

    def check(self, params: ChannelParams) -> None:
        s = self.stiffness(params)
        if s >= STABILITY_LIMIT:
            raise DomainError(
                f"dt={self.dt:g} too large: dt*(gamma N + |chi| N^2) = {s:.3g} >= {STABILITY_LIMIT}"
            )

    @classmethod
    def for_params(cls, params: ChannelParams, n_cut: int, tol: float = 1e-9,
                   courant: float = 0.02) -> "IntegratorConfig":
        rate = params.gamma * n_cut + abs(params.chi) * n_cut ** 2
        dt = courant / rate if rate > 0 else max(params.t, 1.0)
        return cls(dt=dt, n_cut=n_cut, tol=tol)


def _rhs(rho, params, m, n, sq_diff, hop):
    out = (-1j * params.chi * sq_diff - params.gamma * (m + n)) * rho
    out[:-1, :-1] += 2.0 * params.gamma * hop * rho[1:, 1:]
    return out


def _rk4(rho0: np.ndarray, params: ChannelParams, steps: int) -> np.ndarray:
    N = rho0.shape[0]
    idx = np.arange(N, dtype=float)
    m = idx[:, None]
    n = idx[None, :]
    sq_diff = m ** 2 - n ** 2
    hop = np.sqrt((idx[:-1, None] + 1) * (idx[None, :-1] + 1))
    h = params.t / steps
    rho = rho0.astype(complex).copy()
    for _ in range(steps):
        k1 = _rhs(rho, params, m, n, sq_diff, hop)
        k2 = _rhs(rho + 0.5 * h * k1, params, m, n, sq_diff, hop)
        k3 = _rhs(rho + 0.5 * h * k2, params, m, n, sq_diff, hop)
        k4 = _rhs(rho + h * k3, params, m, n, sq_diff, hop)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def integrate_master_equation(rho0: DensityMatrix, params: ChannelParams,
                              cfg: IntegratorConfig | None = None) -> DensityMatrix:
    """RK4 on the Fock-basis master equation, accepted by a step-halving check."""
    N = rho0.n_cut
    if cfg is None:
        cfg = IntegratorConfig.for_params(params, N)
    if cfg.n_cut != N:
        raise DomainError(f"config n_cut={cfg.n_cut} does not match rho0 (N={N})")
    cfg.check(params)
    if params.t == 0:
        return rho0
    steps = max(1, math.ceil(params.t / cfg.dt))
    coarse = _rk4(rho0.data, params, steps)
    fine = _rk4(rho0.data, params, 2 * steps)
    diff = float(np.max(np.abs(fine - coarse)))
    if diff >= cfg.tol:
        raise IntegratorError(
            f"step halving changed the result by {diff:.3g} (tol {cfg.tol:g})",
            coarse=DensityMatrix(coarse), fine=DensityMatrix(fine),
        )
    return DensityMatrix(fine)


def _lambda(d: int, params: ChannelParams) -> complex:
    # direct evaluation, deliberately not shared with the channel module
    if params.gamma == 0 or params.t == 0:
        return 0j
    rate = params.gamma + 1j * params.chi * d
    return complex(params.gamma * (1 - np.exp(-2 * params.t * rate)) / rate)


def quadrature_moment(initial_wf, m: int, n: int, params: ChannelParams,
                      radius: float, tol: float = 1e-11) -> complex:
    """Brute-force quadrature of the moment integral

        E_mn = 4 int d^2b / pi  W0(b) exp(2 (L - 1)/(L + 1) |b|^2) H_mn(2b/sqrt(L+1), 2b*/sqrt(L+1))

    with L = Lambda_mn.  ``initial_wf`` maps a complex array of points to the
    initial Wigner function; ``radius`` bounds its support.
    """
    lam = _lambda(m - n, params)
    w = lam + 1.0
    r = np.sqrt(w)
    expo = 2.0 * (lam - 1.0) / w
    lf = 0.5 * (math.lgamma(m + 1) + math.lgamma(n + 1))

    def integrand(beta):
        h = hermite_table(m, n, 2 * beta / r, 2 * np.conj(beta) / r, scaled=True)[m, n]
        return 4.0 / math.pi * initial_wf(beta) * np.exp(expo * np.abs(beta) ** 2) * h

    val, _ = integrate_adaptive(integrand, radius + 6 / math.sqrt(2), tol=tol)
    return complex(val) * math.exp(lf)

"""Wigner functions of the Kerr + loss channel.

Convention: W(alpha) = Tr[rho D(2 alpha) (-1)^{a^dag a}] / pi, which
integrates to 1/2 over the plane (not 1).  A coherent state |z> has
W = exp(-2 |alpha - z|^2) / pi.

Three independent routes are provided:

* ``wigner_from_density``: displaced parity of an explicit density matrix,
  with <n|D(beta)|m> from the associated-Laguerre closed form;
* ``evolve_wigner``: the evolution series sum_{m,n} C_mn(alpha, t) E_mn over
  anti-diagonals m + n = k, with E_mn a moment of the initial Wigner function;
* ``wigner_coherent_evolved`` / ``damping_kernel``: closed forms for a
  coherent input and for pure loss.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy import stats

from .channel import (ChannelParams, DensityMatrix, _lambda_from_diff, lambda_coeff)
from .errors import DomainError, SeriesError, ValidationError
from .quadrature import integrate_adaptive
from .special_fn import (genlaguerre_table, hermite_table, laguerre, log_factorials,
                         scaled_antidiagonals)

REAL_TOL = 1e-9
DEFAULT_TOL = 1e-13
MAX_ORDER = 400
_CHUNK = 2048


@dataclass(frozen=True)
class Coherent:
    z: complex

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))


@dataclass(frozen=True)
class Number:
    s: int

    def __post_init__(self):
        if int(self.s) != self.s or self.s < 0:
            raise DomainError(f"number state needs an integer s >= 0, got {self.s}")
        object.__setattr__(self, "s", int(self.s))


@dataclass(frozen=True)
class Matrix:
    rho: DensityMatrix


InitialState = Union[Coherent, Number, Matrix]


def describe(source: InitialState) -> dict:
    if isinstance(source, Coherent):
        return {"kind": "coherent", "z": [source.z.real, source.z.imag]}
    if isinstance(source, Number):
        return {"kind": "number", "s": source.s}
    if isinstance(source, Matrix):
        return {"kind": "matrix", "n_cut": source.rho.n_cut}
    raise TypeError(f"unknown initial state {source!r}")


def as_density(source: InitialState, n_cut: int | None = None) -> DensityMatrix:
    if isinstance(source, Coherent):
        return DensityMatrix.coherent(source.z, n_cut)
    if isinstance(source, Number):
        return DensityMatrix.fock(source.s, n_cut)
    if isinstance(source, Matrix):
        return source.rho if n_cut is None else source.rho.embed(n_cut)
    raise TypeError(f"unknown initial state {source!r}")


def support_radius(source: InitialState) -> float:
    """Radius outside which the initial Wigner function is Gaussian-negligible."""
    if isinstance(source, Coherent):
        return abs(source.z)
    if isinstance(source, Number):
        return math.sqrt(source.s + 1.0)
    return math.sqrt(source.rho.n_cut) + 1.0


# -- displaced parity ---------------------------------------------------------

def displacement_elements(beta, n_cut: int) -> np.ndarray:
    """``out[n, m, ...] = <n|D(beta)|m>`` for n, m < n_cut."""
    beta = np.asarray(beta, dtype=complex)
    x = np.abs(beta) ** 2
    lag = genlaguerre_table(n_cut - 1, n_cut - 1, x)  # lag[j, a] = L_j^{(a)}(x)
    lf = log_factorials(n_cut - 1)
    gauss = np.exp(-0.5 * x)
    out = np.empty((n_cut, n_cut) + beta.shape, dtype=complex)
    for n in range(n_cut):
        for m in range(n_cut):
            if n >= m:
                k = n - m
                pref = math.exp(0.5 * (lf[m] - lf[n])) * beta ** k
                out[n, m] = pref * gauss * lag[m, k]
            else:
                k = m - n
                pref = math.exp(0.5 * (lf[n] - lf[m])) * (-np.conj(beta)) ** k
                out[n, m] = pref * gauss * lag[n, k]
    return out


def wigner_from_density_points(rho: DensityMatrix, alphas, herm_tol: float = 1e-10) -> np.ndarray:
    if rho.hermiticity_error() > herm_tol:
        raise ValidationError("wigner_from_density needs a Hermitian density matrix")
    alphas = np.asarray(alphas, dtype=complex)
    flat = alphas.ravel()
    N = rho.n_cut
    parity = (-1.0) ** np.arange(N)
    weights = rho.data * parity[:, None]  # rho_mn (-1)^m
    out = np.empty(flat.shape, dtype=float)
    for lo in range(0, flat.size, _CHUNK):
        pts = flat[lo:lo + _CHUNK]
        d = displacement_elements(2.0 * pts, N)  # d[n, m]
        w = np.einsum("mn,nmp->p", weights, d) / math.pi
        _check_real(w, pts)
        out[lo:lo + _CHUNK] = w.real
    return out.reshape(alphas.shape)


def wigner_from_density(rho: DensityMatrix, alpha: complex) -> float:
    return float(wigner_from_density_points(rho, np.array([alpha]))[0])


def initial_wigner(source: InitialState) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised W(beta, 0) of an initial state."""
    if isinstance(source, Coherent):
        z = source.z
        return lambda b: np.exp(-2.0 * np.abs(b - z) ** 2) / math.pi
    if isinstance(source, Number):
        s = source.s
        return lambda b: ((-1) ** s / math.pi) * np.exp(-2.0 * np.abs(b) ** 2) * laguerre(s, 4.0 * np.abs(b) ** 2)
    rho = source.rho
    return lambda b: wigner_from_density_points(rho, b)


def _check_real(w: np.ndarray, pts) -> None:
    bad = np.abs(w.imag) > REAL_TOL
    if np.any(bad):
        i = int(np.argmax(np.abs(w.imag)))
        raise ValidationError(
            f"Wigner value at alpha={complex(np.ravel(pts)[i])} has imaginary part {w.imag.flat[i]:.3g}"
        )


# -- evolution series ---------------------------------------------------------

def _lambda_pairs(m: np.ndarray, n: np.ndarray, params: ChannelParams) -> np.ndarray:
    lam = _lambda_from_diff(m - n, params)
    lam[m == n] = lambda_coeff(0, 0, params)
    return lam


def _log_c_prefactor(m, n, lam, params: ChannelParams, lf) -> np.ndarray:
    """log of C_mn without its alpha-dependent factor exp(-2|alpha|^2) H_mn."""
    theta = params.kerr_angle()
    return (-1j * theta * (m * m - n * n) - params.gamma_t * (m + n)
            - lf[m] - lf[n] - 0.5 * (m + n + 2) * np.log(lam + 1.0))


def _log_e_closed(source, m, n, lam, lf) -> np.ndarray:
    """log E_mn from the coherent / number-state closed forms."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if isinstance(source, Coherent):
            z = source.z
            r2 = abs(z) ** 2
            logz = np.log(z) if z != 0 else -np.inf
            zm = np.where(m == 0, 0.0, m * logz)
            zn = np.where(n == 0, 0.0, n * np.conj(logz))
            return (0.5 * (m + n + 2) * np.log(lam + 1.0) + (lam - 1.0) * r2
                    + zm + zn - math.log(math.pi))
        s = source.s
        ok = (m == n) & (m <= s)
        d = np.where(ok, s - m, 0)
        lpow = np.where(d == 0, 0.0, d * np.log(lam))
        val = (math.lgamma(s + 1) - math.log(math.pi) + lpow
               + (m + 1) * np.log(lam + 1.0) - lf[d])
        return np.where(ok, val, -np.inf)


def c_coeff(m: int, n: int, alpha: complex, params: ChannelParams) -> complex:
    """C_mn(alpha, t) of the evolution series."""
    if m < 0 or n < 0:
        raise DomainError("indices must be non-negative")
    lam = lambda_coeff(m, n, params)
    if (lam + 1.0).real <= 0:
        raise DomainError("Lambda + 1 outside the right half-plane")
    lf = 0.5 * log_factorials(max(m, n))
    mm, nn = np.array([m]), np.array([n])
    logc = _log_c_prefactor(mm, nn, np.array([lam]), params, lf)[0]
    alpha = complex(alpha)
    seed = math.exp(-2.0 * abs(alpha) ** 2)
    g = hermite_table(m, n, 2 * alpha.conjugate(), 2 * alpha, scaled=True)[m, n] * seed
    return complex(np.exp(logc) * g)


def e_moment(m: int, n: int, source: InitialState, params: ChannelParams,
             tol: float = 1e-11) -> complex:
    """Moment E_mn of the initial Wigner function (closed form where available)."""
    if m < 0 or n < 0:
        raise DomainError("indices must be non-negative")
    if isinstance(source, Matrix):
        return complex(moments_by_quadrature(source, params, [(m, n)], tol)[0])
    lf = 0.5 * log_factorials(max(m, n, getattr(source, "s", 0)) + 1) * 2
    mm, nn = np.array([m]), np.array([n])
    lam = _lambda_pairs(mm, nn, params)
    return complex(np.exp(_log_e_closed(source, mm, nn, lam, lf))[0])


def moments_by_quadrature(source: InitialState, params: ChannelParams, pairs,
                          tol: float = 1e-11) -> np.ndarray:
    """E_mn for each (m, n) in ``pairs`` by tensor Gauss-Legendre quadrature."""
    w0 = initial_wigner(source)
    half = support_radius(source) + 6.0 / math.sqrt(2.0)
    pairs = [tuple(p) for p in pairs]
    out = np.empty(len(pairs), dtype=complex)
    by_diff: dict[int, list[int]] = {}
    for i, (m, n) in enumerate(pairs):
        by_diff.setdefault(m - n, []).append(i)
    for d, members in by_diff.items():
        lam = complex(_lambda_pairs(np.array([max(d, 0)]), np.array([max(-d, 0)]), params)[0])
        w = lam + 1.0
        if w.real <= 0:
            raise DomainError("Lambda + 1 outside the right half-plane")
        r = np.sqrt(w)
        expo = 2.0 * (lam - 1.0) / w
        mmax = max(pairs[i][0] for i in members)
        nmax = max(pairs[i][1] for i in members)
        sel_m = np.array([pairs[i][0] for i in members])
        sel_n = np.array([pairs[i][1] for i in members])

        def integrand(beta):
            weight = 4.0 / math.pi * w0(beta) * np.exp(expo * np.abs(beta) ** 2)
            res = np.empty((len(members),) + beta.shape, dtype=complex)
            for lo in range(0, beta.shape[0], 8):
                b = beta[lo:lo + 8]
                h = hermite_table(mmax, nmax, 2 * b / r, 2 * np.conj(b) / r, scaled=True)
                res[:, lo:lo + 8] = h[sel_m, sel_n] * weight[lo:lo + 8]
            return res

        vals, _ = integrate_adaptive(integrand, half, tol=tol)
        lf = np.array([0.5 * (math.lgamma(a + 1) + math.lgamma(b + 1)) for a, b in zip(sel_m, sel_n)])
        out[members] = vals * np.exp(lf)
    return out


class _SeriesCoefficients:
    """Per-anti-diagonal products C_mn E_mn / (exp(-2|alpha|^2) h_mn)."""

    def __init__(self, source: InitialState, params: ChannelParams,
                 max_order: int = MAX_ORDER):
        self.source = source
        self.params = params
        if isinstance(source, Number):
            self.last = 2 * source.s
        elif isinstance(source, Matrix):
            self.last = 2 * (source.rho.n_cut - 1)
        else:
            self.last = None
        cap = max_order + 1 if self.last is None else self.last + 1
        self.lf = 0.5 * log_factorials(cap + max(getattr(source, "s", 0), 0) + 1)
        self.moments = None
        if isinstance(source, Matrix):
            N = source.rho.n_cut
            pairs = [(m, n) for m in range(N) for n in range(N)]
            self.moments = moments_by_quadrature(source, params, pairs, tol=1e-11).reshape(N, N)
        self._table = [self._block(k) for k in range(cap)]

    def __call__(self, k: int) -> np.ndarray:
        return self._table[k]

    def _block(self, k: int) -> np.ndarray:
        m = np.arange(k + 1)
        n = k - m
        lam = _lambda_pairs(m, n, self.params)
        logc = _log_c_prefactor(m, n, lam, self.params, self.lf)
        if self.moments is not None:
            N = self.moments.shape[0]
            ok = (m < N) & (n < N)
            e = np.zeros(k + 1, dtype=complex)
            e[ok] = self.moments[m[ok], n[ok]]
            with np.errstate(divide="ignore"):
                coef = np.exp(logc) * e
        else:
            full_lf = 2 * self.lf
            coef = np.exp(logc + _log_e_closed(self.source, m, n, lam, full_lf))
        return np.where(np.isfinite(coef), coef, 0)


def _neumaier_add(s, c, x):
    t = s + x
    c = c + np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
    return t, c


def _series_chunk(coeffs: _SeriesCoefficients, alphas: np.ndarray, tol: float,
                  max_order: int, k_min: int):
    P = alphas.size
    seed = np.exp(-2.0 * np.abs(alphas) ** 2)
    gen = scaled_antidiagonals(2.0 * np.conj(alphas), 2.0 * alphas, seed)
    re_s = np.zeros(P); re_c = np.zeros(P)
    im_s = np.zeros(P); im_c = np.zeros(P)
    active = np.ones(P, dtype=bool)
    quiet = np.zeros(P, dtype=int)
    order = np.zeros(P, dtype=int)
    last = coeffs.last
    mag = np.zeros(P)
    for k, g in enumerate(gen):
        if last is not None and k > last:
            break
        if k > max_order:
            partial = re_s + re_c + 1j * (im_s + im_c)
            raise SeriesError(
                f"evolution series not converged by order {max_order}",
                partial=partial, tail=mag,
            )
        K = coeffs(k)
        terms = K[:, None] * g
        block = np.where(active, terms.sum(axis=0), 0)
        mag = np.abs(terms).sum(axis=0)
        re_s, re_c = _neumaier_add(re_s, re_c, block.real)
        im_s, im_c = _neumaier_add(im_s, im_c, block.imag)
        order[active] = k
        if last is None:
            total = np.abs(re_s + re_c + 1j * (im_s + im_c))
            small = mag < tol * (total + 1e-300)
            quiet = np.where(small, quiet + 1, 0)
            if k >= k_min:
                active &= quiet < 3
            if not active.any():
                break
    return re_s + re_c + 1j * (im_s + im_c), order


def _k_min(source: InitialState) -> int:
    if isinstance(source, Coherent):
        return int(math.ceil(4 * abs(source.z) ** 2)) + 4
    return 0


def evolve_wigner_points(source: InitialState, alphas, params: ChannelParams,
                         tol: float = DEFAULT_TOL, max_order: int = MAX_ORDER,
                         workers: int = 1, coeffs: _SeriesCoefficients | None = None,
                         method: str = "auto"):
    """Vectorised evolution series; returns ``(values, orders_used)``.

    ``method="terms"`` always sums term by term; ``"auto"`` sums a coherent
    input analytically when the Kerr phases are trivial (order 0 reported).
    """
    if method not in ("auto", "terms"):
        raise DomainError(f"unknown summation method {method!r}")
    alphas = np.asarray(alphas, dtype=complex)
    if not tol > 0:
        raise DomainError("tol must be positive")
    flat = alphas.ravel()
    if method == "auto" and isinstance(source, Coherent) and params.kerr_angle() == 0.0:
        return _coherent_generating_sum(source.z, alphas, params), np.zeros(alphas.shape, dtype=int)
    coeffs = coeffs or _SeriesCoefficients(source, params, max_order)
    k_min = _k_min(source)
    chunks = [flat[lo:lo + _CHUNK] for lo in range(0, flat.size, _CHUNK)]

    def run(pts):
        vals, order = _series_chunk(coeffs, pts, tol, max_order, k_min)
        _check_real(vals, pts)
        return vals.real, order

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(c) for c in chunks]
    values = np.concatenate([r[0] for r in results]) if results else np.empty(0)
    orders = np.concatenate([r[1] for r in results]) if results else np.empty(0, dtype=int)
    return values.reshape(alphas.shape), orders.reshape(alphas.shape)


def _coherent_generating_sum(z: complex, alphas: np.ndarray, params: ChannelParams) -> np.ndarray:
    """Series summed exactly for a coherent input when every Kerr phase is 1.

    With chi t = 0 (mod 2 pi), Lambda_mn = 1 - e^{-2 gamma t} for all (m, n)
    and C_mn E_mn factorises as u^m u*^n / (m! n!) H_mn(2 alpha*, 2 alpha)
    times a constant, u = z e^{-gamma t}.  The Hermite generating function
    then sums it to exp(-2 |alpha - u|^2) / pi, which keeps far-tail values
    positive where the term-by-term sum only resolves roundoff.
    """
    u = z * params.transmission ** 0.5
    return np.exp(-2.0 * np.abs(alphas - u) ** 2) / math.pi


def evolve_wigner(source: InitialState, alpha: complex, params: ChannelParams,
                  tol: float = DEFAULT_TOL, max_order: int = MAX_ORDER,
                  method: str = "auto") -> float:
    vals, _ = evolve_wigner_points(source, np.array([complex(alpha)]), params, tol,
                                   max_order, method=method)
    return float(vals[0])


# -- closed forms -------------------------------------------------------------

def _coherent_cut(z: complex, tol: float) -> int:
    mu = abs(z) ** 2
    M = 8
    while stats.poisson.sf(M, mu) > (1e-3 * tol) ** 2 and M < MAX_ORDER // 2:
        M += 1
    return M


def wigner_coherent_evolved_points(z: complex, alphas, params: ChannelParams,
                                   tol: float = DEFAULT_TOL) -> np.ndarray:
    """Coherent-input Wigner function summed directly over a square (m, n) block.

    W = exp(-2|alpha|^2)/pi sum_{m,n} z^m z*^n/(m! n!) exp(-i chi t (m^2 - n^2)
        - gamma t (m + n)) exp((Lambda_mn - 1)|z|^2) H_mn(2 alpha*, 2 alpha)
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    z = complex(z)
    alphas = np.asarray(alphas, dtype=complex)
    flat = alphas.ravel()
    M = _coherent_cut(z, tol)
    idx = np.arange(M + 1)
    m = idx[:, None]
    n = idx[None, :]
    lf = log_factorials(M)
    lam = _lambda_pairs(np.broadcast_to(m, (M + 1, M + 1)).copy(),
                        np.broadcast_to(n, (M + 1, M + 1)).copy(), params)
    theta = params.kerr_angle()
    with np.errstate(divide="ignore", invalid="ignore"):
        logz = np.log(z) if z != 0 else -np.inf
        zpow = np.where(m == 0, 0, m * logz) + np.where(n == 0, 0, n * np.conj(logz))
        logA = (zpow - 0.5 * (lf[m] + lf[n]) - 1j * theta * (m * m - n * n)
                - params.gamma_t * (m + n) + (lam - 1.0) * abs(z) ** 2)
        A = np.exp(logA) / math.pi
    A = np.where(np.isfinite(A), A, 0)
    out = np.empty(flat.shape)
    for lo in range(0, flat.size, 256):
        pts = flat[lo:lo + 256]
        h = hermite_table(M, M, 2 * np.conj(pts), 2 * pts, scaled=True)
        w = np.einsum("mn,mnp->p", A, h) * np.exp(-2.0 * np.abs(pts) ** 2)
        _check_real(w, pts)
        out[lo:lo + 256] = w.real
    return out.reshape(alphas.shape)


def wigner_coherent_evolved(z: complex, alpha: complex, params: ChannelParams,
                            tol: float = DEFAULT_TOL) -> float:
    return float(wigner_coherent_evolved_points(z, np.array([complex(alpha)]), params, tol)[0])


def damping_kernel(initial_wf, alpha: complex, params: ChannelParams,
                   support: float = 0.0, tol: float = 1e-11) -> float:
    """Pure-loss evolution as a Gaussian convolution of the initial Wigner function.

    W(alpha, t) = (2/T) int d^2b/pi exp(-(2/T)|alpha - b e^{-gamma t}|^2) W(b, 0),
    T = 1 - exp(-2 gamma t).  ``support`` is the radius of the initial state.
    """
    if params.chi != 0:
        raise DomainError("damping_kernel describes chi = 0 only")
    alpha = complex(alpha)
    T = -math.expm1(-2.0 * params.gamma_t)
    if T == 0.0:
        return float(np.real(initial_wf(np.array([alpha]))[0]))
    shrink = math.exp(-params.gamma_t)
    half = support + 6.0 / math.sqrt(2.0)
    width = math.sqrt(T / 2.0) / shrink  # kernel width in beta
    center = 0j
    if 6.5 * width < half:
        center = alpha / shrink
        half = 6.5 * width

    def integrand(beta):
        k = np.exp(-(2.0 / T) * np.abs(alpha - beta * shrink) ** 2)
        return (2.0 / T) / math.pi * k * initial_wf(beta)

    val, _ = integrate_adaptive(integrand, half, center, tol=tol)
    return float(np.real(val))


# -- grids ---------------------------------------------------------------------

@dataclass(frozen=True)
class WignerGrid:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    n_re: int
    n_im: int
    values: np.ndarray = field(repr=False)
    params: ChannelParams
    source: InitialState
    max_order: int = 0
    tol: float = DEFAULT_TOL

    @property
    def re_axis(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.n_re)

    @property
    def im_axis(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.n_im)

    def points(self) -> np.ndarray:
        return self.re_axis[:, None] + 1j * self.im_axis[None, :]

    def integral(self) -> float:
        """Trapezoidal integral of W over the window (1/2 for a contained state)."""
        inner = np.trapezoid(self.values, self.im_axis, axis=1)
        return float(np.trapezoid(inner, self.re_axis))

    def metadata(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "chi_t": self.params.chi_t,
            "gamma_t": self.params.gamma_t,
            "source": describe(self.source),
            "window": [self.re_min, self.re_max, self.im_min, self.im_max],
            "resolution": [self.n_re, self.n_im],
            "max_order": self.max_order,
            "tol": self.tol,
            "integral_convention": "half",
        }


def wigner_grid(source: InitialState, params: ChannelParams, window, resolution,
                tol: float = DEFAULT_TOL, workers: int = 1,
                max_order: int = MAX_ORDER, method: str = "auto") -> WignerGrid:
    """Evaluate the evolution series on a rectangular grid.

    ``window`` is (re_min, re_max, im_min, im_max) or a half-width L meaning
    [-L, L]^2; ``resolution`` is n or (n_re, n_im).
    """
    if np.ndim(window) == 0:
        L = float(window)
        window = (-L, L, -L, L)
    re_min, re_max, im_min, im_max = map(float, window)
    if not (re_max > re_min and im_max > im_min):
        raise DomainError(f"empty window {window}")
    if np.ndim(resolution) == 0:
        resolution = (int(resolution), int(resolution))
    n_re, n_im = map(int, resolution)
    if n_re < 2 or n_im < 2:
        raise DomainError("resolution must be >= 2 per axis")
    re = np.linspace(re_min, re_max, n_re)
    im = np.linspace(im_min, im_max, n_im)
    pts = re[:, None] + 1j * im[None, :]
    try:
        vals, orders = evolve_wigner_points(source, pts, params, tol, max_order, workers,
                                            method=method)
    except SeriesError as exc:
        bad = np.ravel(pts)[np.argmax(np.abs(np.ravel(exc.tail)))] if exc.tail is not None else None
        raise SeriesError(f"{exc} (grid point alpha={bad})", exc.partial, exc.tail) from exc
    return WignerGrid(re_min, re_max, im_min, im_max, n_re, n_im, vals, params, source,
                      int(orders.max()), tol)

"""Cross-validation battery run by ``kerrwigner verify`` and the acceptance tests.

Each check returns a :class:`Check` carrying the worst observed deviation and
the tolerance it was held to.  Parameters are the desk-scale set used
throughout the test suite.
"""
from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .channel import (ChannelParams, DensityMatrix, coherent_cutoff, evolve_density,
                      normalization_defect)
from .oracle import integrate_master_equation, quadrature_moment
from .photon_stats import number_pn, pn_from_density, pn_overlap_distribution
from .special_fn import (hermite2, hermite_bilinear_sum,
                         hermite_diagonal_sum, laguerre, sum_until_converged)
from .photon_stats import f_overlap_check
from .quadrature import integrate_adaptive
from .wigner import (Coherent, Number, as_density, damping_kernel, e_moment,
                     evolve_wigner_points, initial_wigner, wigner_coherent_evolved_points,
                     wigner_from_density_points, wigner_grid)

FIG1_CHI_T = {"a": 0.0, "b": 0.04, "c": 0.06, "d": 0.08, "e": 0.1, "f": 0.2}


@dataclass
class Check:
    name: str
    passed: bool
    worst: float
    tol: float
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: worst={self.worst:.3g} tol={self.tol:.3g} "
                f"time={self.seconds:.1f}s {self.detail}").rstrip()


def _points(n: int = 50, half: float = 4.0, seed: int = 2024) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-half, half, n) + 1j * rng.uniform(-half, half, n)


def _timed(fn: Callable[[], Check]) -> Check:
    t0 = time.perf_counter()
    chk = fn()
    chk.seconds = time.perf_counter() - t0
    return chk


def kraus_vs_ode() -> Check:
    def run():
        p = ChannelParams(chi=1.0, gamma=0.2, t=0.1)
        sources = [DensityMatrix.coherent(2.0, 25), DensityMatrix.fock(3, 25),
                   DensityMatrix.random(25, seed=7)]
        worst = max(float(np.max(np.abs(evolve_density(r, p).data
                                        - integrate_master_equation(r, p).data)))
                    for r in sources)
        return Check("1 Kraus closed form vs RK4", worst <= 1e-6, worst, 1e-6)
    chk = _timed(run)
    if chk.seconds >= 10:
        chk.passed = False
        chk.detail = "runtime limit 10 s exceeded"
    return chk


def kraus_normalization() -> Check:
    def run():
        worst = 0.0
        for gt in (0.1, 0.5):
            p = ChannelParams(chi=0.3, gamma=gt, t=1.0)
            worst = max(worst, normalization_defect(p, 30, 20))
            rho = DensityMatrix.random(30, seed=3)
            worst = max(worst, abs(evolve_density(rho, p).trace() - rho.trace()))
        return Check("2 Kraus normalisation and trace", worst <= 1e-10, worst, 1e-10)
    return _timed(run)


def three_path_wigner() -> Check:
    def run():
        pts = _points()
        worst = 0.0
        for source in (Coherent(2.0), Number(3)):
            rho0 = as_density(source, coherent_cutoff(2.0))
            for chi_t in (0.0, 0.1):
                for gamma_t in (0.0, 0.3):
                    p = ChannelParams(chi=chi_t, gamma=gamma_t, t=1.0)
                    series, _ = evolve_wigner_points(source, pts, p, method="terms")
                    w_ode = wigner_from_density_points(integrate_master_equation(rho0, p), pts)
                    w_kraus = wigner_from_density_points(evolve_density(rho0, p), pts)
                    worst = max(worst, np.max(np.abs(series - w_ode)),
                                np.max(np.abs(series - w_kraus)), np.max(np.abs(w_ode - w_kraus)))
        return Check("3 three-path Wigner agreement", worst <= 1e-6, float(worst), 1e-6)
    chk = _timed(run)
    if chk.seconds >= 60:
        chk.passed = False
        chk.detail = "runtime limit 60 s exceeded"
    return chk


def loss_limit() -> Check:
    def run():
        z = 2.0
        p = ChannelParams(chi=0.0, gamma=0.4, t=1.0)
        pts = _points(20, seed=11)
        series, _ = evolve_wigner_points(Coherent(z), pts, p, method="terms")
        w0 = initial_wigner(Coherent(z))
        kernel = np.array([damping_kernel(w0, a, p, support=abs(z)) for a in pts])
        worst = float(np.max(np.abs(series - kernel)))
        return Check("4 chi=0 limit vs Gaussian kernel", worst <= 1e-7, worst, 1e-7)
    return _timed(run)


def lossless_limit() -> Check:
    def run():
        z = 2.0
        pts = _points(50, seed=5)
        worst = 0.0
        for chi_t in (0.04, 0.06, 0.1, 0.2):
            p = ChannelParams.from_products(chi_t, 0.0)
            series, _ = evolve_wigner_points(Coherent(z), pts, p, method="terms")
            direct = wigner_coherent_evolved_points(z, pts, p)
            worst = max(worst, float(np.max(np.abs(series - direct))))
        revived, _ = evolve_wigner_points(Coherent(z), pts, ChannelParams(1.0, 0.0, 2 * math.pi),
                                          method="terms")
        start, _ = evolve_wigner_points(Coherent(z), pts, ChannelParams(1.0, 0.0, 0.0),
                                        method="terms")
        worst = max(worst, float(np.max(np.abs(revived - start))))
        worst = max(worst, float(np.max(np.abs(start - np.exp(-2 * np.abs(pts - z) ** 2) / math.pi))))
        return Check("5 gamma=0 limit and Kerr revival", worst <= 1e-8, worst, 1e-8)
    return _timed(run)


def number_binomial() -> Check:
    def run():
        s = 4
        pts = _points(30, seed=9)
        statics = [wigner_from_density_points(DensityMatrix.fock(k, s + 1), pts) for k in range(s + 1)]
        w_worst = 0.0
        p_worst = 0.0
        for chi in (0.0, 3.0):
            p = ChannelParams(chi=chi, gamma=0.25, t=1.0)
            eta = p.transmission
            mix = sum(stats.binom.pmf(k, s, eta) * statics[k] for k in range(s + 1))
            series, _ = evolve_wigner_points(Number(s), pts, p, method="terms")
            w_worst = max(w_worst, float(np.max(np.abs(series - mix))))
            pn = pn_from_density(evolve_density(DensityMatrix.fock(s, 10), p))
            p_worst = max(p_worst, float(np.max(np.abs(pn.probs[: s + 1] - number_pn(s, p).probs))),
                          float(np.max(np.abs(pn.probs[s + 1:]))))
        ok = w_worst <= 1e-7 and p_worst <= 1e-10
        return Check("6 number-state binomial law", ok, max(w_worst, p_worst), 1e-7,
                     detail=f"(wigner {w_worst:.2g} <= 1e-7, pn {p_worst:.2g} <= 1e-10)")
    return _timed(run)


def pn_chi_independence() -> Check:
    def run():
        z = 1.5
        src = Coherent(z)
        n_max = 20
        dists = {}
        for chi in (0.0, 2.0):
            p = ChannelParams(chi=chi, gamma=0.3, t=0.2)
            dists[chi] = (pn_overlap_distribution(src, p, n_max).probs,
                          pn_from_density(evolve_density(as_density(src), p)).probs[: n_max + 1])
        worst = max(float(np.max(np.abs(dists[0.0][i] - dists[2.0][i]))) for i in range(2))
        paths = float(np.max(np.abs(dists[0.0][0] - dists[0.0][1])))
        return Check("7 photon-number chi independence", worst <= 1e-10, worst, 1e-10,
                     detail=f"(overlap vs density {paths:.2g})")
    return _timed(run)


def appendix_identities() -> Check:
    def run():
        devs = {}
        # diagonal sum: sum_l z^l/l! H_{m+l,n+l}
        cases = [(0.3, 1, 1, 1.0, 1.0), (0.1 + 0.05j, 2, 0, 1 + 1j, 1 - 1j), (0.0, 2, 3, 0.4j, 1.2)]
        d = 0.0
        for z, m, n, x, y in cases:
            series = sum_until_converged(
                lambda l: z ** l / math.factorial(l) * hermite2(m + l, n + l, x, y), max_terms=150)
            d = max(d, abs(series - hermite_diagonal_sum(z, m, n, x, y)))
        devs["diag-sum"] = (d, 1e-12)
        # bilinear sum truncated at m, n <= 40
        s_, t_, x, y, a, b = 0.2, 0.3, 1.0, 1.0, 1.0, 1.0
        tot = 0.0
        for m in range(41):
            for n in range(41):
                tot += (s_ ** m * t_ ** n / (math.factorial(m) * math.factorial(n))
                        * hermite2(m, n, x, y) * hermite2(m, n, a, b))
        devs["bilinear"] = (abs(tot - hermite_bilinear_sum(s_, t_, x, y, a, b)), 1e-12)
        # orthogonality by quadrature
        gram = _orthogonality_gram(4)
        d = 0.0
        for mp, np_, m, n in np.ndindex(gram.shape):
            exp = math.factorial(m) * math.factorial(n) if (mp == n and np_ == m) else 0.0
            d = max(d, abs(gram[mp, np_, m, n] - exp))
        devs["orthogonality"] = (d, 1e-6)
        # Laguerre relation
        rng = np.random.default_rng(1)
        d = 0.0
        for s in range(13):
            for u in rng.normal(size=3) + 1j * rng.normal(size=3):
                lhs = laguerre(s, u) * (-1) ** s * math.factorial(s)
                rhs = hermite2(s, s, 1.0, u)
                d = max(d, abs(lhs - rhs) / max(1.0, abs(rhs)))
        devs["laguerre"] = (d, 1e-11)
        # F_mn overlap
        d = 0.0
        for s in range(4):
            for m in range(5):
                for n in range(5):
                    exp = math.factorial(s) / 4 if (m == s and n == s) else 0.0
                    d = max(d, abs(f_overlap_check(m, n, s) - exp))
        devs["F_mn"] = (d, 1e-8)
        passed = all(v <= t for v, t in devs.values())
        ratio = max(v / t for v, t in devs.values())
        detail = "(" + ", ".join(f"{k} {v:.2g}<={t:g}" for k, (v, t) in devs.items()) + ")"
        return Check("8 special-function identities (deviation/tol)", passed, ratio, 1.0,
                     detail=detail)
    return _timed(run)


def _orthogonality_gram(k: int) -> np.ndarray:
    """(1/pi) int e^{-|a|^2} H_{m'n'}(a*, a) H_{mn}(a*, a) d^2a for all indices <= k."""
    from .special_fn import hermite_table

    out = np.empty((k + 1,) * 4, dtype=complex)
    for mp in range(k + 1):
        def f(a):
            t = hermite_table(k, k, np.conj(a), a, scaled=False)
            w = np.exp(-np.abs(a) ** 2) / math.pi
            return np.einsum("b...,cd...,...->bcd...", t[mp], t, w)

        out[mp], _ = integrate_adaptive(f, 9.0, tol=1e-9)
    return out


def fig1_panels(workers: int | None = None, outdir=None) -> Check:
    """Reproduce the six Kerr-only panels for z = 2 on [-4, 4]^2 at 201 x 201."""
    workers = workers or os.cpu_count() or 1

    def run():
        mins, ints = {}, {}
        for label, chi_t in FIG1_CHI_T.items():
            grid = wigner_grid(Coherent(2.0), ChannelParams.from_products(chi_t, 0.0), 4.0, 201,
                               workers=workers)
            mins[label] = float(grid.values.min())
            ints[label] = grid.integral()
            if outdir is not None:
                from .io import write_wigner_grid
                write_wigner_grid(os.path.join(outdir, f"fig1{label}.csv"), grid)
        ok = mins["a"] >= 0 and all(mins[k] < 0 for k in "cdef")
        int_dev = max(abs(v - 0.5) for v in ints.values())
        ok = ok and int_dev <= 1e-3
        detail = "(mins " + " ".join(f"{k}={v:.3g}" for k, v in mins.items()) + ")"
        return Check("9 fig1 panels", ok, int_dev, 1e-3, detail=detail)
    chk = _timed(run)
    if chk.seconds >= 300:
        chk.passed = False
        chk.detail += " runtime limit 300 s exceeded"
    return chk


def coherent_moments() -> Check:
    def run():
        z = 1 + 0.5j
        p = ChannelParams(chi=1.0, gamma=0.3, t=0.2)
        w0 = initial_wigner(Coherent(z))
        worst = 0.0
        for m in range(5):
            for n in range(5):
                q = quadrature_moment(w0, m, n, p, radius=abs(z))
                worst = max(worst, abs(q - e_moment(m, n, Coherent(z), p)))
        return Check("10 coherent moment closed form", worst <= 1e-8, worst, 1e-8)
    return _timed(run)


ALL_CHECKS = [kraus_vs_ode, kraus_normalization, three_path_wigner, loss_limit,
              lossless_limit, number_binomial, pn_chi_independence, appendix_identities,
              fig1_panels, coherent_moments]


def run_all(skip_fig1: bool = False, workers: int | None = None) -> list[Check]:
    out = []
    for fn in ALL_CHECKS:
        if skip_fig1 and fn is fig1_panels:
            continue
        out.append(fig1_panels(workers) if fn is fig1_panels else fn())
    return out

import cmath
import math

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from kerrwigner.errors import DomainError, ScalingRequiredError
from kerrwigner.special_fn import (HermiteTable, genlaguerre, genlaguerre_table, hermite2,
                                   hermite2_scaled, hermite_bilinear_sum, hermite_diagonal_sum,
                                   hermite_table, laguerre, log_factorials,
                                   scaled_antidiagonals, sum_until_converged)

# 40-digit reference: L_40(4) = H_{40,40}(2, 2) / 40!
H40_SCALED_AT_2 = 0.98854631449410697286

small = st.floats(-3, 3, allow_nan=False)
cplx = st.builds(complex, small, small)


def mp_hermite(m, n, x, y):
    x, y = mpmath.mpc(complex(x)), mpmath.mpc(complex(y))
    f = mpmath.factorial
    return sum((-1) ** k * f(m) * f(n) / (f(k) * f(m - k) * f(n - k)) * x ** (m - k) * y ** (n - k)
               for k in range(min(m, n) + 1))


def test_low_orders():
    x, y = 0.7 - 0.2j, 1.3 + 0.4j
    assert hermite2(0, 0, x, y) == 1
    assert hermite2(1, 1, x, y) == pytest.approx(x * y - 1, rel=1e-14)
    assert hermite2(2, 2, x, y) == pytest.approx(x * x * y * y - 4 * x * y + 2, rel=1e-14)
    assert hermite2(3, 0, x, y) == pytest.approx(x ** 3, rel=1e-14)


def test_generating_function_expansion(rng):
    t, tp, X, Y = sympy.symbols("t tp X Y")
    gen = sympy.exp(-t * tp + X * t + Y * tp)
    series = sympy.series(sympy.series(gen, t, 0, 7).removeO(), tp, 0, 7).removeO()
    poly = sympy.Poly(sympy.expand(series), t, tp)
    for _ in range(20):
        x = complex(*rng.uniform(-2, 2, 2))
        y = complex(*rng.uniform(-2, 2, 2))
        for m in range(7):
            for n in range(7 - m):
                coef = poly.coeff_monomial(t ** m * tp ** n) * math.factorial(m) * math.factorial(n)
                ref = complex(sympy.N(coef.subs({X: x, Y: y}), 30))
                assert abs(hermite2(m, n, x, y) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_scaled_high_order_against_big_float():
    mpmath.mp.dps = 60
    assert hermite2_scaled(40, 40, 2.0, 2.0).real == pytest.approx(H40_SCALED_AT_2, rel=1e-12)
    ref = mp_hermite(40, 40, 2, 2) / mpmath.factorial(40)
    assert float(ref.real) == pytest.approx(H40_SCALED_AT_2, rel=1e-15)


@pytest.mark.parametrize("m,n,x,y", [(60, 60, 8, 8), (55, 50, 4 - 4j, 4 + 4j),
                                     (30, 31, 0.3 - 1j, 1.5 + 0.2j), (60, 10, 3, 3)])
def test_scaled_table_matches_big_float(m, n, x, y):
    mpmath.mp.dps = 80
    ref = complex(mp_hermite(m, n, x, y) / mpmath.sqrt(mpmath.factorial(m) * mpmath.factorial(n)))
    assert abs(hermite2_scaled(m, n, x, y) - ref) <= 1e-12 * abs(ref)


def test_overflow_requires_scaling():
    with pytest.raises(ScalingRequiredError):
        hermite2(200, 200, 2.0, 2.0)
    assert math.isfinite(abs(hermite2_scaled(200, 200, 2.0, 2.0)))


def test_negative_order_rejected():
    with pytest.raises(DomainError):
        hermite2(-1, 0, 1, 1)


@given(cplx, cplx)
def test_recurrences_and_symmetries(x, y):
    H = hermite_table(8, 8, x, y, scaled=False)
    for m in range(8):
        for n in range(8):
            scale = max(1.0, abs(H[m + 1, n]), abs(x * H[m, n]))
            rhs = x * H[m, n] - (n * H[m, n - 1] if n else 0)
            assert abs(H[m + 1, n] - rhs) <= 1e-11 * scale
            rhs = y * H[m, n] - (m * H[m - 1, n] if m else 0)
            assert abs(H[m, n + 1] - rhs) <= 1e-11 * max(1.0, abs(H[m, n + 1]), abs(y * H[m, n]))
    Hs = hermite_table(8, 8, y, x, scaled=False)
    Hc = hermite_table(8, 8, np.conj(x), np.conj(y), scaled=False)
    tol = 1e-13 * max(1.0, np.max(np.abs(H)))
    assert np.max(np.abs(Hs.T - H)) <= tol
    assert np.max(np.abs(np.conj(H) - Hc)) <= tol


def test_scaled_relation(rng):
    x, y = 1.1 + 0.3j, -0.4 + 0.9j
    H = hermite_table(10, 12, x, y, scaled=False)
    h = hermite_table(10, 12, x, y, scaled=True)
    lf = log_factorials(12)
    ratio = np.exp(0.5 * (lf[:11, None] + lf[None, :13]))
    assert np.allclose(h * ratio, H, rtol=1e-13, atol=0)


def test_vectorised_table_matches_scalar(rng):
    xs = rng.normal(size=5) + 1j * rng.normal(size=5)
    ys = rng.normal(size=5) + 1j * rng.normal(size=5)
    T = hermite_table(6, 4, xs, ys)
    assert T.shape == (7, 5, 5)
    for i in range(5):
        assert np.allclose(T[..., i], hermite_table(6, 4, xs[i], ys[i]), rtol=1e-14)


def test_antidiagonals_match_table():
    x = np.array([4 - 2j, 0.0, 1.5j])
    y = np.conj(x)
    seed = np.exp(-np.abs(x) ** 2 / 2)
    T = hermite_table(25, 25, x, y)
    for k, diag in enumerate(scaled_antidiagonals(x, y, seed)):
        if k > 25:
            break
        ref = np.array([T[i, k - i] for i in range(k + 1)]) * seed
        assert np.allclose(diag, ref, rtol=1e-12, atol=1e-14 * np.max(np.abs(ref)))


def test_hermite_table_object():
    t = HermiteTable.build(10, 1 + 1j, 1 - 1j)
    assert t.unscaled(3, 2) == pytest.approx(hermite2(3, 2, 1 + 1j, 1 - 1j), rel=1e-13)


def test_laguerre_examples():
    assert laguerre(0, 3.3) == 1
    assert laguerre(1, 0.4) == pytest.approx(0.6)
    assert laguerre(2, 4.0) == pytest.approx(1.0)
    mpmath.mp.dps = 30
    assert laguerre(40, 4.0) == pytest.approx(float(mpmath.laguerre(40, 0, 4)), rel=1e-13)
    assert genlaguerre(5, 3, 1.7) == pytest.approx(float(mpmath.laguerre(5, 3, 1.7)), rel=1e-13)
    tab = genlaguerre_table(6, 4, 2.5)
    assert tab[6, 4] == pytest.approx(float(mpmath.laguerre(6, 4, 2.5)), rel=1e-13)


@given(st.integers(0, 12), cplx)
def test_laguerre_hermite_relation(s, u):
    lhs = laguerre(s, u) * (-1) ** s * math.factorial(s)
    rhs = hermite2(s, s, 1.0, u)
    assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(rhs))


def _diag_series(z, m, n, x, y):
    return sum_until_converged(lambda l: z ** l / math.factorial(l) * hermite2(m + l, n + l, x, y),
                               max_terms=150)


@pytest.mark.parametrize("z,m,n,x,y", [(0.3, 1, 1, 1.0, 1.0),
                                       (0.1 + 0.05j, 2, 0, 1 + 1j, 1 - 1j),
                                       (-0.2 + 0.1j, 3, 1, 0.5, -0.7j)])
def test_diagonal_sum(z, m, n, x, y):
    assert abs(hermite_diagonal_sum(z, m, n, x, y) - _diag_series(z, m, n, x, y)) <= 1e-12


def test_diagonal_sum_identity_and_branch():
    assert hermite_diagonal_sum(0, 2, 3, 0.5, 1.5) == pytest.approx(hermite2(2, 3, 0.5, 1.5))
    with pytest.raises(DomainError):
        hermite_diagonal_sum(-1.0, 1, 1, 1, 1)
    with pytest.raises(DomainError):
        hermite_diagonal_sum(-1.5 + 0.2j, 1, 1, 1, 1)


def test_bilinear_sum():
    s, t, x, y, a, b = 0.2, 0.3, 1.0, 1.0, 1.0, 1.0
    ref = sum(s ** m * t ** n / (math.factorial(m) * math.factorial(n))
              * hermite2(m, n, x, y) * hermite2(m, n, a, b)
              for m in range(41) for n in range(41))
    assert abs(hermite_bilinear_sum(s, t, x, y, a, b) - ref) <= 1e-12
    assert hermite_bilinear_sum(0, 0, 1.3, 2, 0.5, 1j) == 1
    assert hermite_bilinear_sum(0.5, 0, 1.3, 2, 0.8, 1j) == pytest.approx(cmath.exp(0.5 * 1.3 * 0.8))
    with pytest.raises(DomainError):
        hermite_bilinear_sum(1.0, 1.0, 0, 0, 0, 0)


def test_sum_until_converged():
    assert sum_until_converged(lambda k: 1.5 ** k / math.factorial(k)) == pytest.approx(math.exp(1.5), rel=1e-15)

import cmath
import math

import numpy as np
import pytest

from kerrwigner.errors import QuadratureError
from kerrwigner.quadrature import integrate_adaptive, integrate_square


def test_gaussian_area():
    val = integrate_square(lambda b: np.exp(-np.abs(b) ** 2), 8.0, n=64)
    assert val == pytest.approx(math.pi, rel=1e-13)


@pytest.mark.parametrize("zeta,xi,eta", [(-1.0, 0.3, 0.5), (-2 + 0.5j, 0.2 - 0.1j, 1j),
                                         (-0.7, 1.0, -1.0)])
def test_complex_gaussian_formula(zeta, xi, eta):
    # int d^2z / pi exp(zeta |z|^2 + xi z + eta z*) = -exp(-xi eta / zeta) / zeta
    f = lambda z: np.exp(zeta * np.abs(z) ** 2 + xi * z + eta * np.conj(z)) / math.pi
    val, err = integrate_adaptive(f, 14.0, tol=1e-12)
    assert abs(val - (-cmath.exp(-xi * eta / zeta) / zeta)) <= 1e-11
    assert err <= 1e-12


def test_leading_axes_and_center():
    c = 1.5 - 2j
    f = lambda b: np.stack([np.exp(-np.abs(b - c) ** 2), np.abs(b - c) ** 2 * np.exp(-np.abs(b - c) ** 2)])
    val, _ = integrate_adaptive(f, 8.0, center=c)
    assert val.shape == (2,)
    assert np.allclose(val, [math.pi, math.pi], rtol=1e-12)


def test_nonconvergence_reports_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate_adaptive(lambda b: np.sign(b.real - 0.1234), 1.0, tol=1e-14, max_nodes=128)
    assert info.value.estimate is not None
    assert info.value.error > 0

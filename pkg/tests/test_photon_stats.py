import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from kerrwigner.channel import ChannelParams, DensityMatrix, evolve_density
from kerrwigner.errors import DomainError, ValidationError
from kerrwigner.photon_stats import (PnDistribution, closed_form_pn, coherent_pn,
                                     f_overlap_check, number_pn, pn_from_density, pn_overlap,
                                     pn_overlap_distribution)
from kerrwigner.wigner import Coherent, Matrix, Number


def test_coherent_poisson():
    p = ChannelParams(chi=2.0, gamma=0.3, t=0.2)
    z = 1.5
    dens = pn_from_density(evolve_density(DensityMatrix.coherent(z), p))
    pois = coherent_pn(z, p, 20)
    over = pn_overlap_distribution(Coherent(z), p, 20)
    assert np.max(np.abs(dens.probs[:21] - pois.probs)) <= 1e-13
    assert np.max(np.abs(over.probs - pois.probs)) <= 1e-12
    assert pois.mean() == pytest.approx(2.25 * p.transmission, rel=1e-10)


@given(st.integers(0, 6), st.floats(0, 1.5), st.floats(-4, 4))
def test_number_binomial(s, gamma_t, chi):
    p = ChannelParams(chi, gamma_t, 1.0)
    dens = pn_from_density(evolve_density(DensityMatrix.fock(s, s + 2), p))
    assert np.allclose(dens.probs[: s + 1], number_pn(s, p).probs, atol=1e-13)


def test_overlap_number_state():
    p = ChannelParams(0.0, 0.25, 1.0)
    ref = stats.binom.pmf(np.arange(5), 4, math.exp(-0.5))
    got = [pn_overlap(Number(4), s, p) for s in range(5)]
    assert np.allclose(got, ref, atol=1e-12)
    assert pn_overlap(Number(4), 6, p) == pytest.approx(0, abs=1e-12)


def test_vacuum_stays_vacuum():
    dist = closed_form_pn(Number(0), ChannelParams(1, 1, 1), 3)
    assert list(dist.probs) == [1.0, 0.0, 0.0, 0.0]


def test_f_overlap():
    assert f_overlap_check(2, 2, 2).real == pytest.approx(0.5, abs=1e-12)
    assert f_overlap_check(0, 0, 0).real == pytest.approx(0.25, abs=1e-12)
    assert f_overlap_check(3, 3, 3).real == pytest.approx(1.5, abs=1e-11)
    for m, n, s in [(1, 2, 2), (2, 1, 1), (0, 0, 3), (3, 1, 2)]:
        assert abs(f_overlap_check(m, n, s)) <= 1e-8
    with pytest.raises(DomainError):
        f_overlap_check(-1, 0, 0)


def test_distribution_checks():
    PnDistribution(np.array([0.5, 0.5])).check()
    with pytest.raises(ValidationError):
        PnDistribution(np.array([0.5, 0.2])).check()
    with pytest.raises(ValidationError):
        PnDistribution(np.array([1.2, -0.2])).check()
    with pytest.raises(DomainError):
        pn_overlap(Coherent(1), -1, ChannelParams(0, 0, 0))
    with pytest.raises(DomainError):
        closed_form_pn(Matrix(DensityMatrix.fock(1, 3)), ChannelParams(0, 0, 0), 3)
    with pytest.raises(ValidationError):
        pn_from_density(DensityMatrix(np.diag([0.5 + 0.1j, 0.5])))

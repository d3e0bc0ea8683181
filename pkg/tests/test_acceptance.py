"""The ten acceptance criteria, each at its stated tolerance.

Each test prints one PASS/FAIL line; the lines are also collected into the
terminal summary so they appear in plain ``pytest -v`` output.
"""
import os

import pytest

from kerrwigner import verify

from .conftest import ACCEPTANCE_LINES

CRITERIA = [
    verify.kraus_vs_ode,
    verify.kraus_normalization,
    verify.three_path_wigner,
    verify.loss_limit,
    verify.lossless_limit,
    verify.number_binomial,
    verify.pn_chi_independence,
    verify.appendix_identities,
    lambda: verify.fig1_panels(workers=os.cpu_count()),
    verify.coherent_moments,
]
IDS = ["kraus_vs_rk4", "kraus_normalisation", "three_path_wigner", "chi0_limit",
       "gamma0_limit_revival", "number_binomial", "pn_chi_independence",
       "special_function_identities", "fig1_panels", "coherent_moments"]


@pytest.mark.parametrize("criterion", CRITERIA, ids=IDS)
def test_criterion(criterion):
    check = criterion()
    line = check.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert check.passed, line

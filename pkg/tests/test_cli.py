import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from kerrwigner import cli
from kerrwigner import io as kio
from kerrwigner.channel import DensityMatrix
from kerrwigner.errors import ValidationError
from kerrwigner.verify import Check


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_parse_complex():
    assert cli.parse_complex("2+0i") == 2
    assert cli.parse_complex("-1.5-0.25i") == complex(-1.5, -0.25)
    assert cli.parse_complex("3") == 3
    assert cli.parse_complex("0.5i") == 0.5j
    assert cli.parse_complex("1e-3+2i") == complex(1e-3, 2)
    for bad in ["2 + 1i", "abc", "1+2j", ""]:
        with pytest.raises(ValidationError):
            cli.parse_complex(bad)


def test_evolve_revival(tmp_path, capsys):
    out = tmp_path / "rho.txt"
    assert run("evolve", "--coherent", "2+0i", "--chi", 1, "--gamma", 0,
               "--t", 6.283185307179586, "-o", out) == 0
    rho = kio.read_density(out)
    ref = DensityMatrix.coherent(2.0, rho.n_cut)
    assert np.max(np.abs(rho.data - ref.data)) <= 1e-10
    err = capsys.readouterr().err
    assert "trace=" in err and "min_eig=" in err and "tail=" in err


def test_evolve_fock_binomial(tmp_path):
    out = tmp_path / "rho.txt"
    assert run("evolve", "--fock", 3, "--gamma", 0.5, "--t", 0.5, "--chi", 7, "-o", out) == 0
    diag = np.diag(kio.read_density(out).data).real
    assert np.allclose(diag[:4], stats.binom.pmf(range(4), 3, math.exp(-0.5)), atol=1e-14)
    assert run("evolve", "--fock", 0, "--gamma", 1, "--t", 1, "-o", out) == 0
    assert np.diag(kio.read_density(out).data)[0] == 1


def test_evolve_from_density_file(tmp_path):
    src = tmp_path / "in.txt"
    kio.write_density(src, DensityMatrix.random(4, seed=2))
    out = tmp_path / "out.txt"
    assert run("evolve", "--density", src, "--chi-t", 0.3, "--gamma-t", 0.2, "-o", out) == 0
    assert kio.read_density(out).n_cut == 4


def test_pn_chi_independent_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ["pn", "--coherent", "1.5", "--gamma", 0.3, "--t", 0.2]
    assert run(*common, "--chi", 0, "-o", a) == 0
    assert run(*common, "--chi", 2, "-o", b) == 0
    col = lambda p: [f"{float(r.split(',')[1]):.12e}" for r in p.read_text().splitlines()[1:-1]]
    assert col(a) == col(b)


@pytest.mark.parametrize("method", ["density", "overlap", "closed"])
def test_pn_fock_binomial(tmp_path, method):
    out = tmp_path / "pn.csv"
    assert run("pn", "--fock", 4, "--gamma", 0.25, "--t", 1, "--method", method,
               "--n-max", 4, "-o", out) == 0
    dist = kio.read_pn(out)
    assert np.allclose(dist.probs, stats.binom.pmf(range(5), 4, math.exp(-0.5)), atol=1e-12)


def test_wigner_commands(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("wigner", "--fock", 1, "--gamma", 0, "--chi", 5, "--t", 1, "--res", 21, "-o", a) == 0
    assert run("wigner", "--fock", 1, "--t", 0, "--res", 21, "-o", b) == 0
    wa, wb = kio.read_wigner_csv(a)[2], kio.read_wigner_csv(b)[2]
    assert np.allclose(wa, wb, atol=1e-15)
    assert run("wigner", "--coherent", "0", "--t", 0, "--window", 2, "--res", 11, "-o", a) == 0
    re, im, w = kio.read_wigner_csv(a)
    assert np.allclose(w, np.exp(-2 * (re ** 2 + im ** 2)) / math.pi, atol=1e-14)


def test_wigner_fig1f_has_negative_fringes(tmp_path):
    out = tmp_path / "f.csv"
    assert run("wigner", "--coherent", "2", "--chi-t", 0.2, "--gamma", 0, "--window", 4,
               "--res", 41, "-o", out) == 0
    assert kio.read_wigner_csv(out)[2].min() < 0


def test_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["wigner", "--coherent", "1+1i", "--chi-t", 0.1, "--gamma-t", 0.1, "--res", 15]
    run(*args, "-o", a)
    run(*args, "--workers", 2, "-o", b)
    assert a.read_bytes() == b.read_bytes()


def test_fig1_writes_six_panels(tmp_path):
    assert run("fig1", "--res", 11, "--outdir", tmp_path) == 0
    for label in "abcdef":
        assert (tmp_path / f"fig1{label}.csv").exists()
        assert (tmp_path / f"fig1{label}.meta.json").exists()


@pytest.mark.parametrize("argv", [
    ["wigner", "--coherent", "2", "--chi", 0.2, "--chi-t", 0.3],
    ["wigner", "--coherent", "2", "--chi-t", 0.2, "--t", 1],
    ["wigner", "--coherent", "2", "--gamma", 0.2, "--gamma-t", 0.2],
    ["wigner", "--coherent", "2", "--fock", 1],
    ["wigner", "--chi", 1],
    ["evolve", "--coherent", "2 + 1i"],
    ["evolve", "--fock", 1, "--gamma", -1, "--t", 1],
    ["bogus"],
    ["evolve", "--fock", "x"],
])
def test_validation_exit_code(argv, capsys):
    assert run(*argv) == 1
    assert "error:" in capsys.readouterr().err


def test_convergence_exit_code(tmp_path):
    assert run("evolve", "--fock", 6, "--gamma", 0.5, "--t", 1, "--n-cut", 8, "--l-max", 2,
               "-o", tmp_path / "x.txt") == 2


def test_io_exit_code(tmp_path):
    assert run("evolve", "--density", tmp_path / "missing.txt") == 3
    assert run("evolve", "--fock", 1, "--config", tmp_path / "missing.cfg") == 3
    assert run("evolve", "--fock", 1, "-o", tmp_path / "no" / "such" / "dir.txt") == 3


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# experiment\nfock = 2\ngamma = 0.5\nt = 1.0  # seconds\nchi = 3\n")
    out = tmp_path / "pn.csv"
    assert run("pn", "--config", cfg, "--gamma", 0.25, "--n-max", 2, "-o", out) == 0
    assert np.allclose(kio.read_pn(out).probs, stats.binom.pmf(range(3), 2, math.exp(-0.5)))
    cfg.write_text("nonsense = 1\n")
    assert run("pn", "--config", cfg) == 1


@given(st.sampled_from(cli.COMMANDS), st.floats(-5, 5, allow_nan=False),
       st.one_of(st.none(), st.floats(0, 3, allow_nan=False)), st.integers(1, 400),
       st.booleans(), st.sampled_from([None, "2+1i", "-0.5i"]))
def test_run_config_round_trip(command, chi, gamma, res, skip, coherent):
    cfg = cli.RunConfig(command=command, chi=chi, gamma=gamma, res=res, skip_fig1=skip,
                        coherent=coherent, output="out file.csv")
    assert cli.RunConfig.from_text(cfg.to_text()) == cfg


def test_verify_exit_code(monkeypatch, capsys):
    import kerrwigner.verify as verify
    monkeypatch.setattr(verify, "run_all", lambda **kw: [Check("a", True, 0.0, 1.0),
                                                         Check("b", False, 2.0, 1.0)])
    assert run("verify") == 1
    out = capsys.readouterr().out
    assert "[PASS] a" in out and "[FAIL] b" in out and "1/2 checks passed" in out
    monkeypatch.setattr(verify, "run_all", lambda **kw: [Check("a", True, 0.0, 1.0)])
    assert run("verify") == 0

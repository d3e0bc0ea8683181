"""Command-line front end.

    kerrwigner evolve  --coherent 2+0i --chi 1 --gamma 0.2 --t 0.1 -o rho.txt
    kerrwigner wigner  --coherent 2 --chi-t 0.2 --gamma 0 --window 4 --res 201 -o w.csv
    kerrwigner pn      --fock 4 --gamma 0.25 --t 1 -o pn.csv
    kerrwigner fig1    --outdir figs
    kerrwigner verify

Exit codes: 0 success, 1 validation or domain error, 2 convergence failure,
3 I/O error.
"""
from __future__ import annotations

import argparse
import os
import re
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import io as kio
from .channel import ChannelParams, coherent_cutoff, evolve_density
from .errors import KerrWignerError, ValidationError
from .photon_stats import (PnDistribution, closed_form_pn, pn_from_density,
                           pn_overlap_distribution)
from .wigner import (DEFAULT_TOL, MAX_ORDER, Coherent, InitialState, Matrix, Number,
                     as_density, wigner_grid)

COMMANDS = ("evolve", "wigner", "pn", "fig1", "verify")
EXIT_IO = 3
_COMPLEX = re.compile(r"^[0-9eE.+\-]*i?$")


def parse_complex(text: str) -> complex:
    """Parse ``a+bi``, ``a``, ``bi`` (no spaces)."""
    s = text.strip()
    if not s or " " in s or not _COMPLEX.match(s):
        raise ValidationError(f"cannot parse complex amplitude {text!r} (use a+bi)")
    try:
        return complex(s[:-1] + "j" if s.endswith("i") else s)
    except ValueError:
        raise ValidationError(f"cannot parse complex amplitude {text!r} (use a+bi)") from None


@dataclass
class RunConfig:
    command: str
    coherent: str | None = None
    fock: int | None = None
    density: str | None = None
    chi: float | None = None
    gamma: float | None = None
    t: float | None = None
    chi_t: float | None = None
    gamma_t: float | None = None
    n_cut: int | None = None
    l_max: int | None = None
    tol: float | None = None
    window: float = 4.0
    res: int = 201
    method: str | None = None
    n_max: int | None = None
    output: str | None = None
    outdir: str = "."
    workers: int | None = None
    skip_fig1: bool = False

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                lines.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls(**parse_config_text(text))

    def source(self) -> InitialState:
        given = [k for k in ("coherent", "fock", "density") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValidationError("give exactly one of --coherent, --fock, --density")
        if self.coherent is not None:
            return Coherent(parse_complex(str(self.coherent)))
        if self.fock is not None:
            return Number(int(self.fock))
        try:
            rho = kio.read_density(self.density)
        except OSError as exc:
            raise _IOFailure(str(exc)) from exc
        return Matrix(rho.validate())

    def params(self) -> ChannelParams:
        """Rates (chi, gamma, t) or products (chi t, gamma t); see module notes."""
        products = self.chi_t is not None or self.gamma_t is not None
        if self.chi is not None and self.chi_t is not None:
            raise ValidationError("--chi and --chi-t are mutually exclusive")
        if self.gamma is not None and self.gamma_t is not None:
            raise ValidationError("--gamma and --gamma-t are mutually exclusive")
        if products:
            if self.t is not None:
                raise ValidationError("--t cannot be combined with --chi-t/--gamma-t")
            # with t = 1 a remaining rate flag is numerically its own product
            chi_t = self.chi_t if self.chi_t is not None else (self.chi or 0.0)
            gamma_t = self.gamma_t if self.gamma_t is not None else (self.gamma or 0.0)
            return ChannelParams.from_products(chi_t, gamma_t)
        return ChannelParams(chi=self.chi or 0.0, gamma=self.gamma or 0.0,
                             t=0.0 if self.t is None else self.t)


class _IOFailure(Exception):
    pass


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, value: str):
    kind = _TYPES[key]
    if value in ("None", ""):
        return None
    if "bool" in kind:
        if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ValidationError(f"{key}: expected a boolean, got {value!r}")
        return value.lower() in ("true", "1", "yes")
    if "int" in kind:
        return int(value)
    if "float" in kind:
        return float(value)
    return value


def parse_config_text(text: str) -> dict:
    out = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {num}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ValidationError(f"config line {num}: unknown key {key!r}")
        try:
            out[key] = _convert(key, value)
        except ValueError as exc:
            raise ValidationError(f"config line {num}: {exc}") from None
    return out


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors (exit 1), not argparse's exit 2
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kerrwigner",
                     description="Kerr medium with photon loss: density matrices, "
                                 "Wigner functions, photon statistics")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, source=True):
        p.add_argument("--config", help="key = value file; flags override it")
        if source:
            g = p.add_argument_group("initial state")
            g.add_argument("--coherent", help="coherent amplitude a+bi")
            g.add_argument("--fock", type=int, help="number state |s>")
            g.add_argument("--density", help="fock-density v1 file")
            g = p.add_argument_group("channel")
            g.add_argument("--chi", type=float)
            g.add_argument("--gamma", type=float)
            g.add_argument("--t", type=float)
            g.add_argument("--chi-t", type=float, dest="chi_t")
            g.add_argument("--gamma-t", type=float, dest="gamma_t")
        p.add_argument("--tol", type=float)
        p.add_argument("--workers", type=int)

    p = sub.add_parser("evolve", help="evolved density matrix")
    common(p)
    p.add_argument("--n-cut", type=int, dest="n_cut")
    p.add_argument("--l-max", type=int, dest="l_max")
    p.add_argument("-o", "--output")

    p = sub.add_parser("wigner", help="Wigner function on a grid")
    common(p)
    p.add_argument("--window", type=float, help="half-width L of [-L, L]^2")
    p.add_argument("--res", type=int, help="points per axis")
    p.add_argument("-o", "--output")

    p = sub.add_parser("pn", help="photon-number distribution")
    common(p)
    p.add_argument("--n-cut", type=int, dest="n_cut")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--method", choices=("density", "overlap", "closed"))
    p.add_argument("-o", "--output")

    p = sub.add_parser("fig1", help="the six Kerr-only panels for z = 2")
    common(p, source=False)
    p.add_argument("--window", type=float)
    p.add_argument("--res", type=int)
    p.add_argument("--outdir")

    p = sub.add_parser("verify", help="run the cross-validation battery")
    common(p, source=False)
    p.add_argument("--skip-fig1", action="store_true", default=None, dest="skip_fig1")
    return parser


def config_from_args(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        try:
            values.update(parse_config_text(Path(args.config).read_text()))
        except OSError as exc:
            raise _IOFailure(str(exc)) from exc
    values.update({k: v for k, v in vars(args).items() if v is not None and k != "config"})
    values["command"] = args.command
    return RunConfig(**values)


def _out(cfg: RunConfig, default: str) -> str:
    return cfg.output or default


def _n_cut(cfg: RunConfig, source: InitialState) -> int | None:
    if cfg.n_cut is not None:
        return cfg.n_cut
    if isinstance(source, Coherent):
        return coherent_cutoff(source.z)
    return None


def cmd_evolve(cfg: RunConfig) -> int:
    source, params = cfg.source(), cfg.params()
    rho0 = as_density(source, _n_cut(cfg, source))
    rho = evolve_density(rho0, params, cfg.l_max, tol=cfg.tol or 1e-12)
    path = _out(cfg, "rho.txt")
    kio.write_density(path, rho)
    tail = 1.0 - rho.trace().real
    print(f"trace={rho.trace().real:.15g} min_eig={rho.min_eigenvalue():.3g} "
          f"tail={tail:.3g}", file=sys.stderr)
    return 0


def cmd_wigner(cfg: RunConfig) -> int:
    source, params = cfg.source(), cfg.params()
    grid = wigner_grid(source, params, cfg.window, cfg.res, tol=cfg.tol or DEFAULT_TOL,
                       workers=cfg.workers or 1, max_order=MAX_ORDER)
    kio.write_wigner_grid(_out(cfg, "wigner.csv"), grid)
    print(f"min={grid.values.min():.6g} integral={grid.integral():.6g} "
          f"max_order={grid.max_order}", file=sys.stderr)
    return 0


def cmd_pn(cfg: RunConfig) -> int:
    source, params = cfg.source(), cfg.params()
    method = cfg.method or "density"
    if method == "density":
        dist = pn_from_density(evolve_density(as_density(source, _n_cut(cfg, source)), params))
        if cfg.n_max is not None:
            dist = PnDistribution(dist.probs[: cfg.n_max + 1],
                                  float(1.0 - dist.probs[: cfg.n_max + 1].sum()))
    else:
        n_max = cfg.n_max
        if n_max is None:
            n_max = (_n_cut(cfg, source) or as_density(source).n_cut) - 1
        if method == "overlap":
            dist = pn_overlap_distribution(source, params, n_max, tol=cfg.tol or 1e-12)
        else:
            dist = closed_form_pn(source, params, n_max)
    kio.write_pn(_out(cfg, "pn.csv"), dist)
    print(f"mean={dist.mean():.15g} tail={dist.tail:.3g}", file=sys.stderr)
    return 0


def cmd_fig1(cfg: RunConfig) -> int:
    from .verify import FIG1_CHI_T
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for label, chi_t in FIG1_CHI_T.items():
        grid = wigner_grid(Coherent(2.0), ChannelParams.from_products(chi_t, 0.0), cfg.window,
                           cfg.res, tol=cfg.tol or DEFAULT_TOL, workers=cfg.workers or 1)
        kio.write_wigner_grid(outdir / f"fig1{label}.csv", grid, {"panel": label})
        print(f"fig1{label}: chi_t={chi_t:g} min={grid.values.min():.4g} "
              f"integral={grid.integral():.6f}", file=sys.stderr)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import run_all
    checks = run_all(skip_fig1=cfg.skip_fig1, workers=cfg.workers or os.cpu_count())
    for chk in checks:
        print(chk.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


HANDLERS = {"evolve": cmd_evolve, "wigner": cmd_wigner, "pn": cmd_pn,
            "fig1": cmd_fig1, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        return HANDLERS[cfg.command](cfg)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KerrWignerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

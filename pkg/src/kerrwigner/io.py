"""Text formats for density matrices, Wigner grids and photon-number laws.

Floats are written with 17 significant digits, enough for an exact
round trip of IEEE doubles.

fock-density v1::

    fock-density v1 N=<n_cut>
    <m> <n> <re> <im>        (N^2 lines, row-major)

Wigner grid: CSV with header ``re_alpha,im_alpha,w`` (row-major, real axis
outer) plus a ``<stem>.meta.json`` sidecar.  Photon numbers: CSV ``s,p``
followed by ``# tail=<value>``.
"""
from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .channel import DensityMatrix
from .errors import ValidationError
from .photon_stats import PnDistribution
from .wigner import WignerGrid

_HEADER = re.compile(r"^fock-density v1 N=(\d+)$")


def _f(x: float) -> str:
    return format(float(x), ".17g")


def format_density(rho: DensityMatrix) -> str:
    N = rho.n_cut
    lines = [f"fock-density v1 N={N}"]
    for m in range(N):
        for n in range(N):
            v = rho.data[m, n]
            lines.append(f"{m} {n} {_f(v.real)} {_f(v.imag)}")
    return "\n".join(lines) + "\n"


def parse_density(text: str) -> DensityMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty density file")
    match = _HEADER.match(lines[0].strip())
    if not match:
        raise ValidationError(f"bad header {lines[0]!r}")
    N = int(match.group(1))
    if len(lines) - 1 != N * N:
        raise ValidationError(f"expected {N * N} entries, found {len(lines) - 1}")
    data = np.zeros((N, N), dtype=complex)
    seen = np.zeros((N, N), dtype=bool)
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 4:
            raise ValidationError(f"malformed line {ln!r}")
        m, n = int(parts[0]), int(parts[1])
        if not (0 <= m < N and 0 <= n < N) or seen[m, n]:
            raise ValidationError(f"bad or duplicate index in {ln!r}")
        seen[m, n] = True
        data[m, n] = complex(float(parts[2]), float(parts[3]))
    return DensityMatrix(data)


def write_density(path, rho: DensityMatrix) -> None:
    Path(path).write_text(format_density(rho))


def read_density(path) -> DensityMatrix:
    return parse_density(Path(path).read_text())


def sidecar_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".meta.json")


def write_wigner_grid(path, grid: WignerGrid, extra: dict | None = None) -> None:
    pts = grid.points()
    rows = ["re_alpha,im_alpha,w"]
    for i in range(grid.n_re):
        for j in range(grid.n_im):
            a = pts[i, j]
            rows.append(f"{_f(a.real)},{_f(a.imag)},{_f(grid.values[i, j])}")
    Path(path).write_text("\n".join(rows) + "\n")
    meta = grid.metadata()
    if extra:
        meta.update(extra)
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_wigner_csv(path):
    """Return (re, im, w) arrays from a grid CSV."""
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return arr[:, 0], arr[:, 1], arr[:, 2]


def format_pn(dist: PnDistribution) -> str:
    rows = ["s,p"]
    rows += [f"{s},{_f(p)}" for s, p in enumerate(dist.probs)]
    rows.append(f"# tail={_f(dist.tail)}")
    return "\n".join(rows) + "\n"


def write_pn(path, dist: PnDistribution) -> None:
    Path(path).write_text(format_pn(dist))


def read_pn(path) -> PnDistribution:
    probs = []
    tail = 0.0
    for ln in Path(path).read_text().splitlines():
        if ln.startswith("# tail="):
            tail = float(ln.split("=", 1)[1])
        elif ln and not ln.startswith(("s,", "#")):
            probs.append(float(ln.split(",")[1]))
    return PnDistribution(np.array(probs), tail)

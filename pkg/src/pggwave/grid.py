"""Uniform truncated grid, second-order difference operators, profile I/O.

Profiles live on the n interior nodes of [-L, L]; the two endpoint values are
Dirichlet data stored alongside the samples and folded into every difference
stencil as ghost values at distance h.  All operators are plain centered
second-order stencils.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import GridError
from .model import ModelParams, StateVec, reaction

__all__ = [
    "Grid",
    "Profile",
    "make_grid",
    "apply_advection_diffusion",
    "residual",
    "save_profile",
    "load_profile",
]


@dataclass(frozen=True)
class Grid:
    L: float
    n: int
    h: float
    nodes: np.ndarray


def make_grid(L: float, n: int) -> Grid:
    """Uniform grid with n interior nodes on [-L, L], spacing h = 2L/(n+1)."""
    if L <= 0:
        raise GridError(f"half-length must be positive, got {L}")
    if n < 3:
        raise GridError(f"need at least 3 interior nodes, got {n}")
    h = 2.0 * L / (n + 1)
    nodes = -L + h * np.arange(1, n + 1)
    return Grid(L=float(L), n=int(n), h=h, nodes=nodes)


@dataclass(frozen=True)
class Profile:
    """Two-component field sampled on a grid, with Dirichlet endpoint data."""

    grid: Grid
    u: np.ndarray
    v: np.ndarray
    c: float | None
    boundary_left: StateVec
    boundary_right: StateVec

    def __post_init__(self):
        if len(self.u) != self.grid.n or len(self.v) != self.grid.n:
            raise GridError("sample arrays must match the grid's node count")

    def with_speed(self, c: float) -> "Profile":
        return replace(self, c=c)

    def samples(self) -> np.ndarray:
        """Samples as an (n, 2) array, column 0 = u."""
        return np.stack([self.u, self.v], axis=1)


def apply_advection_diffusion(g: Grid, c: float, f: np.ndarray,
                              bl: float, br: float) -> np.ndarray:
    """Centered f'' - c f' with Dirichlet ghosts bl, br at -L and +L."""
    f = np.asarray(f, dtype=float)
    if len(f) != g.n:
        raise GridError("sample array must match the grid's node count")
    fl = np.concatenate(([bl], f[:-1]))
    fr = np.concatenate((f[1:], [br]))
    return (fl - 2.0 * f + fr) / g.h**2 - c * (fr - fl) / (2.0 * g.h)


def residual(p: ModelParams, prof: Profile) -> np.ndarray:
    """Nodewise residual of the wave system, shape (n, 2).

    Column j is u_j'' - c u_j' + F_j(u, v) evaluated with the profile's own
    Dirichlet data; identically zero exactly when the profile solves the
    discretized system.
    """
    if prof.c is None:
        raise GridError("profile has no wave speed set")
    g = prof.grid
    lin_u = apply_advection_diffusion(g, prof.c, prof.u,
                                      prof.boundary_left[0], prof.boundary_right[0])
    lin_v = apply_advection_diffusion(g, prof.c, prof.v,
                                      prof.boundary_left[1], prof.boundary_right[1])
    f = reaction(p, StateVec(prof.u, prof.v))
    return np.stack([lin_u + f[0], lin_v + f[1]], axis=1)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def save_profile(prof: Profile, csv_path, json_path=None, *, alpha: float,
                 k: float, sigma1: float = 0.0, sigma2: float = 0.0) -> None:
    """Write a profile as CSV ``xi,u,v`` plus a JSON metadata sidecar.

    The CSV includes the two boundary rows at xi = -L and xi = +L; values are
    written with 17 significant digits so a round trip is bit-faithful.
    """
    csv_path = Path(csv_path)
    g = prof.grid
    lines = ["xi,u,v"]
    lines.append(",".join(map(_fmt, (-g.L, prof.boundary_left[0], prof.boundary_left[1]))))
    for x, uu, vv in zip(g.nodes, prof.u, prof.v):
        lines.append(",".join(map(_fmt, (x, uu, vv))))
    lines.append(",".join(map(_fmt, (g.L, prof.boundary_right[0], prof.boundary_right[1]))))
    csv_path.write_text("\n".join(lines) + "\n")

    meta = {
        "alpha": alpha, "k": k,
        "c": prof.c, "L": g.L, "n": g.n,
        "sigma1": sigma1, "sigma2": sigma2,
    }
    if json_path is None:
        json_path = csv_path.with_suffix(".json")
    Path(json_path).write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def load_profile(csv_path, json_path=None) -> tuple[Profile, dict]:
    """Inverse of save_profile; returns the profile and its metadata dict."""
    csv_path = Path(csv_path)
    if json_path is None:
        json_path = csv_path.with_suffix(".json")
    meta = json.loads(Path(json_path).read_text())
    g = make_grid(meta["L"], meta["n"])

    rows = csv_path.read_text().strip().splitlines()
    if rows[0].strip() != "xi,u,v":
        raise ValueError(f"unexpected CSV header {rows[0]!r}")
    data = np.array([[float(t) for t in r.split(",")] for r in rows[1:]])
    if len(data) != g.n + 2:
        raise ValueError("CSV row count does not match the sidecar's n")
    bl = StateVec(data[0, 1], data[0, 2])
    br = StateVec(data[-1, 1], data[-1, 2])
    prof = Profile(grid=g, u=data[1:-1, 1].copy(), v=data[1:-1, 2].copy(),
                   c=meta["c"], boundary_left=bl, boundary_right=br)
    return prof, meta

"""Vector upper/lower solutions built from scalar fronts, and their ordering.

The upper solution is (K* w, w) with w the upper scalar front; the lower is
(K* l w, w) with w the lower scalar front of parameter l.  Both satisfy the
componentwise differential inequalities of the wave system, which
``verify_bound`` checks nodewise with the same discrete operators the
solvers use, so the margins are at solver-tolerance level rather than at
O(h^2).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError, ShiftNotFoundError, VerificationError
from .grid import Grid, Profile, residual
from .kpp import ScalarProfile, lower_nonlinearity, solve_kpp, upper_nonlinearity
from .model import ModelParams, StateVec

__all__ = [
    "BoundPair",
    "MarginReport",
    "default_l",
    "build_upper",
    "build_lower",
    "verify_bound",
    "order_shift",
    "make_bounds",
    "shifted_upper_samples",
    "margins_to_csv",
]


@dataclass(frozen=True)
class BoundPair:
    upper: Profile
    lower: Profile
    shift: float  # r >= 0 applied to the upper, a grid multiple
    l: float


@dataclass(frozen=True)
class MarginReport:
    """Nodewise inequality margins for one bound profile."""

    kind: str                 # "upper" | "lower"
    margins: np.ndarray       # (n, 2)
    worst: float              # max margin for upper, min for lower
    worst_xi: float
    worst_component: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol if self.kind == "upper" else self.worst >= -self.tol


def default_l(p: ModelParams, fraction: float = 0.48) -> float:
    """Lower-solution parameter at a fixed fraction of its admissible range."""
    return fraction * (1.0 - p.k + p.k * p.alpha)


def build_upper(p: ModelParams, s: ScalarProfile) -> Profile:
    """Componentwise (K* w, w) on the scalar front's grid.

    Boundary data scale the scalar front's own data, so the right end is
    exactly (K*, 1) and the left end is the scalar's tiny pinned datum.
    """
    return Profile(
        grid=s.grid,
        u=p.kstar * s.w,
        v=s.w.copy(),
        c=s.c,
        boundary_left=StateVec(p.kstar * s.boundary_left, s.boundary_left),
        boundary_right=StateVec(p.kstar * s.boundary_right, s.boundary_right),
    )


def build_lower(p: ModelParams, l: float, s: ScalarProfile) -> Profile:
    """Componentwise (K* l w, w); right boundary strictly below (K*, 1)."""
    lmax = 1.0 - p.k + p.k * p.alpha
    if not (0.0 < l < lmax):
        raise ParameterError(f"lower-solution parameter l={l} outside (0, {lmax})")
    return Profile(
        grid=s.grid,
        u=p.kstar * l * s.w,
        v=s.w.copy(),
        c=s.c,
        boundary_left=StateVec(p.kstar * l * s.boundary_left, s.boundary_left),
        boundary_right=StateVec(p.kstar * l * s.boundary_right, s.boundary_right),
    )


def verify_bound(p: ModelParams, prof: Profile, c: float, kind: str,
                 tol: float = 1e-7) -> MarginReport:
    """Evaluate both differential-inequality left-hand sides nodewise.

    Upper solutions need both components <= tol; lower solutions >= -tol.
    Raises VerificationError (carrying the worst node) on failure.
    """
    if kind not in ("upper", "lower"):
        raise ParameterError(f"kind must be 'upper' or 'lower', got {kind!r}")
    margins = residual(p, prof.with_speed(c))
    if kind == "upper":
        flat = np.argmax(margins)
        worst = float(margins.flat[flat])
        bad = worst > tol
    else:
        flat = np.argmin(margins)
        worst = float(margins.flat[flat])
        bad = worst < -tol
    node, comp = divmod(int(flat), 2)
    report = MarginReport(kind=kind, margins=margins, worst=worst,
                          worst_xi=float(prof.grid.nodes[node]),
                          worst_component=comp, tol=tol)
    if bad:
        raise VerificationError(
            f"{kind} solution inequality fails: margin {worst:.3e} at "
            f"xi={report.worst_xi:.4f}, component {comp}",
            xi=report.worst_xi, component=comp, margin=worst,
        )
    return report


def shifted_upper_samples(upper: Profile, m: int) -> np.ndarray:
    """Upper samples translated left by m grid cells, shape (n, 2).

    Grid-multiple shifts are exact index shifts (any interpolant through the
    nodes agrees with the samples there); past +L the profile is extended by
    its right boundary value.
    """
    n = upper.grid.n
    ext = np.array(upper.boundary_right, dtype=float)
    out = np.empty((n, 2))
    S = upper.samples()
    if m < n:
        out[: n - m] = S[m:]
        out[n - m:] = ext
    else:
        out[:] = ext
    return out


def order_shift(upper: Profile, lower: Profile) -> float:
    """Smallest r = m*h >= 0 with upper(. + r) >= lower(.) at every node."""
    if upper.grid.n != lower.grid.n or upper.grid.L != lower.grid.L:
        raise ParameterError("bounds must share one grid")
    n = upper.grid.n
    LO = lower.samples()
    for m in range(n + 2):
        if np.all(shifted_upper_samples(upper, m) >= LO):
            return m * upper.grid.h
    raise ShiftNotFoundError(
        "no ordering shift r <= 2L exists; the grid is too short"
    )


def make_bounds(p: ModelParams, c: float, g: Grid, l: float | None = None,
                tol: float = 1e-12) -> BoundPair:
    """Solve both scalar fronts, build the vector bounds, compute the shift."""
    if l is None:
        l = default_l(p)
    s_up = solve_kpp(upper_nonlinearity(p), c, g, tol=tol)
    s_lo = solve_kpp(lower_nonlinearity(p, l), c, g, tol=tol)
    upper = build_upper(p, s_up)
    lower = build_lower(p, l, s_lo)
    r = order_shift(upper, lower)
    return BoundPair(upper=upper, lower=lower, shift=r, l=l)


def margins_to_csv(report: MarginReport, grid: Grid, path) -> None:
    lines = ["xi,margin_u,margin_v"]
    for x, (mu, mv) in zip(grid.nodes, report.margins):
        lines.append(f"{x:.17g},{mu:.17g},{mv:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")

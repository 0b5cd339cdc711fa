"""Scalar KPP boundary-value solves that seed the vector bounds.

Two nonlinearities are supported: the "upper" one, whose front rises to 1,
and the "lower" family with parameter l in (0, 1-k+k*alpha), whose front
rises to a plateau strictly below 1.  Both share f'(0) = alpha, so both
fronts decay at the same rate toward -inf for a given speed.

On the truncated domain the phase of the front is controlled by the left
Dirichlet datum: with the datum exactly zero the discrete problem's unique
solution collapses into a layer at +L, while a small positive datum pins a
front whose position depends log-linearly on the datum.  ``solve_kpp``
exploits this: it translates the profile (monotone interpolation, boundary
data included) and re-solves until the half-plateau crossing sits at the
origin.  The stored left datum therefore is a tiny positive number (of the
order of the natural tail value e^{-mu*L}) rather than exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from .errors import ConvergenceError, ParameterError, SubcriticalSpeedError
from .grid import Grid
from .model import ModelParams

__all__ = [
    "KppNonlinearity",
    "ScalarProfile",
    "upper_nonlinearity",
    "lower_nonlinearity",
    "plateau_of",
    "solve_kpp",
    "scalar_residual",
]

_FD_STEP = 1e-6


@dataclass(frozen=True)
class KppNonlinearity:
    """Tagged reaction term f for the scalar front equation w'' - c w' + f(w) = 0.

    ``l`` is None for the upper variant (plateau 1); otherwise the lower
    variant with parameter l.
    """

    params: ModelParams
    l: float | None = None

    def __post_init__(self):
        if self.l is not None:
            p = self.params
            lmax = 1.0 - p.k + p.k * p.alpha
            if not (0.0 < self.l < lmax):
                raise ParameterError(
                    f"lower-solution parameter l={self.l} outside (0, {lmax})"
                )

    @property
    def is_upper(self) -> bool:
        return self.l is None

    @property
    def plateau(self) -> float:
        return plateau_of(self)

    @property
    def rate_at_zero(self) -> float:
        """f'(0); equals alpha exactly for both variants."""
        return self.params.alpha

    def f(self, w):
        p = self.params
        w = np.asarray(w, dtype=float)
        pref = p.alpha / (1.0 - p.k + p.alpha * p.k)
        if self.l is None:
            return pref / (1.0 + p.k * p.kstar * (1.0 - w)) * w * (1.0 - w)
        q = 1.0 / self.plateau
        return pref / (1.0 + p.k * p.kstar * (1.0 - self.l * w)) * w * (1.0 - q * w)

    def fprime(self, w):
        """Centered finite difference of f; accurate far beyond solver needs."""
        return (self.f(w + _FD_STEP) - self.f(w - _FD_STEP)) / (2.0 * _FD_STEP)

    def decay_rate_at_plateau(self) -> float:
        """-f'(plateau) > 0, computed numerically from the closed-form f."""
        return -float(self.fprime(self.plateau))

    def plateau_slope_report(self) -> dict:
        """Numeric f'(plateau) next to the closed constants quoted for each variant.

        For the lower variant the quoted constant disagrees with the
        closed-form f; the numeric value is authoritative and is the one the
        solvers use.
        """
        p = self.params
        numeric = float(self.fprime(self.plateau))
        if self.l is None:
            printed = -p.alpha / (1.0 - p.k + p.alpha * p.k)
        else:
            printed = -(1.0 - self.l + self.l * p.alpha) / (
                1.0 - self.l + self.l * p.alpha * (1.0 - p.k + p.alpha * p.k)
            )
        return {"numeric": numeric, "printed": printed}


def upper_nonlinearity(p: ModelParams) -> KppNonlinearity:
    return KppNonlinearity(params=p, l=None)


def lower_nonlinearity(p: ModelParams, l: float) -> KppNonlinearity:
    return KppNonlinearity(params=p, l=l)


def plateau_of(nl: KppNonlinearity) -> float:
    """Right limit of the front: 1 for the upper variant, <1 for the lower."""
    if nl.l is None:
        return 1.0
    p = nl.params
    kk = p.k * p.kstar
    return (1.0 + kk - p.kstar) / (1.0 + kk - nl.l * p.kstar)


@dataclass(frozen=True)
class ScalarProfile:
    grid: Grid
    w: np.ndarray
    c: float
    plateau: float
    boundary_left: float  # pinned tiny positive left datum
    boundary_right: float


def scalar_residual(nl: KppNonlinearity, prof: ScalarProfile) -> np.ndarray:
    """Nodewise residual w'' - c w' + f(w) with the profile's Dirichlet data."""
    g, w = prof.grid, prof.w
    fl = np.concatenate(([prof.boundary_left], w[:-1]))
    fr = np.concatenate((w[1:], [prof.boundary_right]))
    lin = (fl - 2.0 * w + fr) / g.h**2 - prof.c * (fr - fl) / (2.0 * g.h)
    return lin + nl.f(w)


def _newton(nl, g: Grid, c, w, bl, br, tol, max_iter):
    """Damped Newton on the discretized BVP; returns (w, converged)."""
    h = g.h
    lo = 1.0 / h**2 + c / (2.0 * h)
    hi = 1.0 / h**2 - c / (2.0 * h)

    def res(w_):
        fl = np.concatenate(([bl], w_[:-1]))
        fr = np.concatenate((w_[1:], [br]))
        return (fl - 2.0 * w_ + fr) / h**2 - c * (fr - fl) / (2.0 * h) + nl.f(w_)

    r = res(w)
    for _ in range(max_iter):
        rmax = np.max(np.abs(r))
        if rmax < tol:
            return w, True
        ab = np.zeros((3, g.n))
        ab[0, 1:] = hi
        ab[1, :] = -2.0 / h**2 + nl.fprime(w)
        ab[2, :-1] = lo
        dw = solve_banded((1, 1), ab, -r)
        lam = 1.0
        while lam >= 1.0 / 64.0:
            wn = w + lam * dw
            rn = res(wn)
            if np.max(np.abs(rn)) < rmax:
                w, r = wn, rn
                break
            lam /= 2.0
        else:
            return w, False  # stalled
    return w, np.max(np.abs(res(w))) < tol


def _monotone_fallback(nl, g: Grid, c, bl, br, tol, max_iter):
    """Monotone iteration from the constant plateau; guaranteed but slow."""
    h = g.h
    beta = max(0.0, float(-np.min(nl.fprime(np.linspace(0.0, nl.plateau, 201))))) + 1.0
    ab = np.zeros((3, g.n))
    ab[0, 1:] = -(1.0 / h**2 - c / (2.0 * h))
    ab[1, :] = 2.0 / h**2 + beta
    ab[2, :-1] = -(1.0 / h**2 + c / (2.0 * h))
    w = np.full(g.n, nl.plateau)
    for _ in range(max_iter):
        rhs = nl.f(w) + beta * w
        rhs[0] += (1.0 / h**2 + c / (2.0 * h)) * bl
        rhs[-1] += (1.0 / h**2 - c / (2.0 * h)) * br
        wn = solve_banded((1, 1), ab, rhs)
        d = np.max(np.abs(wn - w))
        w = wn
        if d < tol:
            return w
    raise ConvergenceError("scalar monotone fallback did not converge")


def _crossing(g: Grid, w, bl, br, level) -> float:
    """Location where the monotone interpolant of the profile crosses level."""
    xs = np.concatenate(([-g.L], g.nodes, [g.L]))
    ys = np.concatenate(([bl], w, [br]))
    interp = PchipInterpolator(xs, ys)
    idx = np.nonzero(ys >= level)[0]
    if len(idx) == 0 or idx[0] == 0:
        raise ConvergenceError("profile does not cross the pinning level")
    a, b = xs[idx[0] - 1], xs[idx[0]]
    return brentq(lambda x: float(interp(x)) - level, a, b, xtol=1e-13)


def solve_kpp(nl: KppNonlinearity, c: float, g: Grid, tol: float = 1e-12,
              max_iter: int = 100, phase_tol: float = 1e-9,
              fallback_max_iter: int = 200_000) -> ScalarProfile:
    """Solve the scalar front BVP, phase-pinned so w(0) = plateau/2.

    Damped Newton from a tanh initial guess, with a scalar monotone-iteration
    fallback if Newton stalls.  The phase loop translates the converged
    profile (monotone interpolation, clamped to [0, plateau] beyond the
    ends, Dirichlet data included) and re-solves until the half-plateau
    crossing sits at the origin; each pass the left datum moves by the factor
    e^{mu * crossing}, so the loop converges in a handful of passes.
    """
    if tol <= 0:
        raise ParameterError("tolerance must be positive")
    a1 = nl.rate_at_zero
    if c < 2.0 * math.sqrt(a1) - 1e-12:
        raise SubcriticalSpeedError(
            f"speed {c} below critical {2.0 * math.sqrt(a1)} for the scalar front"
        )
    b = nl.plateau
    half = b / 2.0
    mu = (c - math.sqrt(max(c * c - 4.0 * a1, 0.0))) / 2.0

    bl, br = b * math.exp(-mu * g.L), b
    w = np.clip(half * (1.0 + np.tanh(g.nodes / 4.0)) + bl, 0.0, b)

    x0 = math.inf
    prev = None  # (log bl, crossing) of the previous pass, for the secant step
    for _ in range(16):
        w, ok = _newton(nl, g, c, w, bl, br, tol, max_iter)
        if not ok:
            w = _monotone_fallback(nl, g, c, bl, br, tol, fallback_max_iter)
        x0 = _crossing(g, w, bl, br, half)
        if abs(x0) < phase_tol:
            break
        # translate by x0: evaluate the monotone interpolant at xi + x0,
        # clamped to the boundary data outside [-L, L]
        xs = np.concatenate(([-g.L], g.nodes, [g.L]))
        ys = np.concatenate(([bl], w, [br]))
        interp = PchipInterpolator(xs, ys)
        q = np.clip(g.nodes + x0, -g.L, g.L)
        w = np.clip(interp(q), 0.0, b)
        # move the left datum: pure exponential heuristic first, then secant
        # on (log datum, crossing), which also handles the critical-speed
        # polynomial prefactor
        logbl = math.log(bl)
        if prev is not None and abs(x0 - prev[1]) > 1e-15:
            step = -x0 * (logbl - prev[0]) / (x0 - prev[1])
        else:
            step = mu * x0
        prev = (logbl, x0)
        bl = math.exp(logbl + step)
    else:
        raise ConvergenceError(
            f"phase pinning did not settle (last crossing {x0:.3e})"
        )
    return ScalarProfile(grid=g, w=w, c=float(c), plateau=b,
                         boundary_left=bl, boundary_right=br)

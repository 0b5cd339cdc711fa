import numpy as np
import pytest

from pggwave import (Profile, StateVec, apply_advection_diffusion, load_profile,
                     make_grid, reaction, residual, save_profile)
from pggwave.errors import GridError


def test_make_grid_examples():
    g = make_grid(10.0, 3)
    assert g.h == 5.0
    assert np.allclose(g.nodes, [-5.0, 0.0, 5.0])
    g = make_grid(40.0, 3999)
    assert g.h == pytest.approx(0.02, abs=1e-15)
    assert g.nodes[0] == pytest.approx(-40.0 + g.h)
    assert g.nodes[-1] == pytest.approx(40.0 - g.h)


@pytest.mark.parametrize("L,n", [(1.0, 2), (0.0, 9), (-3.0, 9)])
def test_make_grid_rejects(L, n):
    with pytest.raises(GridError):
        make_grid(L, n)


def test_operator_exact_on_linears():
    g = make_grid(10.0, 99)
    f = 0.7 * g.nodes - 0.2
    out = apply_advection_diffusion(g, 0.0, f, 0.7 * -10.0 - 0.2, 0.7 * 10.0 - 0.2)
    assert np.max(np.abs(out)) < 1e-12


def test_operator_exact_on_quadratics():
    g = make_grid(10.0, 19)
    f = g.nodes**2
    out = apply_advection_diffusion(g, 0.0, f, 100.0, 100.0)
    assert np.max(np.abs(out - 2.0)) < 1e-12


def test_operator_second_order_on_sine():
    errs = []
    for n in (199, 399):
        g = make_grid(10.0, n)
        f = np.sin(g.nodes)
        out = apply_advection_diffusion(g, 1.0, f, np.sin(-10.0), np.sin(10.0))
        exact = -np.sin(g.nodes) - np.cos(g.nodes)
        errs.append(np.max(np.abs(out - exact)))
    ratio = errs[0] / errs[1]
    assert 3.5 < ratio < 4.5


def _const_profile(g, state, c=1.25):
    return Profile(grid=g, u=np.full(g.n, state[0]), v=np.full(g.n, state[1]),
                   c=c, boundary_left=StateVec(*state), boundary_right=StateVec(*state))


def test_residual_zero_at_equilibria(base_params):
    g = make_grid(20.0, 199)
    p = base_params
    for state in [(0.0, 0.0), (p.kstar, 1.0)]:
        res = residual(p, _const_profile(g, state))
        assert np.max(np.abs(res)) < 1e-14


def test_residual_observed_order(base_params):
    # manufactured smooth profile with closed-form derivatives
    p = base_params
    c = 1.1
    errs = []
    for n in (199, 399):
        g = make_grid(10.0, n)
        xi = g.nodes
        u = 0.3 * (1.0 + np.tanh(xi / 3.0))
        v = 0.5 * (1.0 + np.tanh(xi / 4.0))
        du = 0.3 / 3.0 / np.cosh(xi / 3.0) ** 2
        dv = 0.5 / 4.0 / np.cosh(xi / 4.0) ** 2
        ddu = -2.0 * 0.3 / 9.0 * np.tanh(xi / 3.0) / np.cosh(xi / 3.0) ** 2
        ddv = -2.0 * 0.5 / 16.0 * np.tanh(xi / 4.0) / np.cosh(xi / 4.0) ** 2
        f = reaction(p, StateVec(u, v))
        exact = np.stack([ddu - c * du + f[0], ddv - c * dv + f[1]], axis=1)
        ub = (0.3 * (1.0 + np.tanh(-10.0 / 3.0)), 0.3 * (1.0 + np.tanh(10.0 / 3.0)))
        vb = (0.5 * (1.0 + np.tanh(-10.0 / 4.0)), 0.5 * (1.0 + np.tanh(10.0 / 4.0)))
        prof = Profile(grid=g, u=u, v=v, c=c,
                       boundary_left=StateVec(ub[0], vb[0]),
                       boundary_right=StateVec(ub[1], vb[1]))
        errs.append(np.max(np.abs(residual(p, prof) - exact)))
    order = np.log2(errs[0] / errs[1])
    assert 1.9 < order < 2.1


def test_profile_length_validation():
    g = make_grid(10.0, 9)
    with pytest.raises(GridError):
        Profile(grid=g, u=np.zeros(5), v=np.zeros(9), c=None,
                boundary_left=StateVec(0.0, 0.0), boundary_right=StateVec(0.0, 0.0))


def test_serialization_round_trip(tmp_path):
    g = make_grid(7.0, 23)
    rng = np.random.default_rng(3)
    prof = Profile(grid=g, u=rng.standard_normal(g.n), v=rng.standard_normal(g.n),
                   c=1.25, boundary_left=StateVec(0.0, 0.0),
                   boundary_right=StateVec(1.2, 1.0))
    csv = tmp_path / "profile.csv"
    save_profile(prof, csv, alpha=0.25, k=0.5, sigma1=0.05, sigma2=0.5)
    loaded, meta = load_profile(csv)
    assert np.array_equal(loaded.u, prof.u)
    assert np.array_equal(loaded.v, prof.v)
    assert loaded.c == prof.c
    assert loaded.boundary_left == prof.boundary_left
    assert loaded.boundary_right == prof.boundary_right
    assert meta == {"alpha": 0.25, "k": 0.5, "c": 1.25, "L": 7.0, "n": 23,
                    "sigma1": 0.05, "sigma2": 0.5}

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sfk import action_coords, boundary_image, corpus, invert, invert_many, make_chart, solve_a
from sfk.chart import action_jacobian, edge_distances, edge_interval
from sfk.errors import NonMonotoneA, PointNotInterior
from sfk.polygon import edge_values, validate


def test_solve_a_examples(o2):
    assert solve_a(o2) == (0.0, 1.0)
    assert solve_a(corpus.quadrant()) == (0.0,)
    a3 = validate([(0, 1), (1, 0), (2, -1), (3, -2)], [0, 0, 1, 3])
    assert solve_a(a3) == (0.0, 1.0, 2.0)


@pytest.mark.parametrize("p", [1, 2, 3, 4])
@pytest.mark.parametrize("lam", [0.25, 1.0, 7.5])
def test_op_second_parameter_is_lambda3(p, lam):
    assert solve_a(corpus.o_minus(p, lam))[1] == lam


def test_solve_a_rejects_decreasing(monkeypatch):
    # offsets consistent with a_2 < a_1 are already rejected by validation, so
    # feed a polygon object that bypasses it
    P = corpus.o_minus(2)
    bad = type(P)(P.normals, (0.0, 0.0, -1.0), name="bad")
    with pytest.raises(NonMonotoneA):
        solve_a(bad)


def test_quadrant_action_coords():
    c = make_chart(corpus.quadrant())
    assert np.allclose(action_coords(c, 0.0, 1.0), [0.5, 0.5])


@given(st.floats(-50, 50), st.floats(1e-3, 50))
def test_quadrant_action_coords_closed_form(H, r):
    c = make_chart(corpus.quadrant())
    x1, x2 = action_coords(c, H, r)
    rho = math.hypot(H, r)
    assert x1 == pytest.approx(0.5 * (H + rho), rel=1e-12, abs=1e-12)
    assert x2 == pytest.approx(0.5 * (-H + rho), rel=1e-12, abs=1e-12)
    assert x1 - x2 == pytest.approx(H, abs=1e-12 * (1 + rho))


@pytest.mark.parametrize("nu", [(0.0, 0.0), (1.0, -1.0), (0.5, -0.45)])
def test_o2_action_coords_closed_form(o2, nu, rng):
    c = make_chart(o2, nu)
    H = rng.uniform(-4, 4, 50)
    r = rng.uniform(0.1, 4, 50)
    x = action_coords(c, H, r)
    beta = 2 * nu[1]                       # the closed form's beta is twice the chart's
    two_x1 = H + np.hypot(H, r) - (H + 1) + np.hypot(H + 1, r) - beta * r * r / 2
    assert np.allclose(2 * x[:, 0], two_x1, rtol=1e-13, atol=1e-13)


def test_jacobian_matches_finite_differences(corpus_charts, rng):
    for name, nu, c in corpus_charts:
        H = c.center + c.scale * rng.uniform(-2, 2, 20)
        r = c.scale * rng.uniform(0.2, 3, 20)
        J = action_jacobian(c, H, r)
        h = 1e-6 * c.scale
        dH = (action_coords(c, H + h, r) - action_coords(c, H - h, r)) / (2 * h)
        dr = (action_coords(c, H, r + h) - action_coords(c, H, r - h)) / (2 * h)
        fd = np.stack([dH, dr], axis=-1)
        assert np.allclose(fd, J, rtol=1e-7, atol=1e-7 * np.abs(J).max()), (name, nu)


def test_boundary_image_examples(o2):
    q = make_chart(corpus.quadrant())
    edges, x = boundary_image(q, 3.0)
    assert edges == (1,) and np.allclose(x, [3, 0])
    c = make_chart(o2)
    edges, x = boundary_image(c, -2.0)
    assert edges == (3,)
    assert 2 * x[0] - x[1] + 1 == pytest.approx(0, abs=1e-14)
    edges, x = boundary_image(c, -1.0)
    assert edges == (2, 3)
    assert np.allclose(x, o2.vertices()[1])


def test_boundary_map_lands_on_edges(corpus_charts, rng):
    for name, nu, c in corpus_charts:
        for j in range(1, c.d + 1):
            lo, hi = edge_interval(c, j)
            lo = max(lo, -20 * c.scale + c.center)
            hi = min(hi, 20 * c.scale + c.center)
            Hs = rng.uniform(lo, hi, 100)
            ell = edge_values(c.polygon, action_coords(c, Hs, np.zeros_like(Hs)))
            assert np.all(np.abs(ell[:, j - 1]) <= 1e-9 * (1 + np.abs(Hs))), (name, j)
            others = np.delete(ell, j - 1, axis=1)
            assert np.all(others > 0), (name, j)


def test_proper_along_rays(o2_tn_chart):
    for phi in np.linspace(0.1, np.pi - 0.1, 7):
        rho = np.logspace(0, 5, 30)
        x = action_coords(o2_tn_chart, rho * np.cos(phi), rho * np.sin(phi))
        assert np.all(np.diff(np.linalg.norm(x, axis=1)) > 0)


def test_invert_quadrant_example():
    c = make_chart(corpus.quadrant())
    H, r = invert(c, (1.0, 4.0))
    assert H == pytest.approx(-3.0, abs=1e-12)
    assert r == pytest.approx(4.0, abs=1e-12)


def test_invert_round_trip_with_nut(o2_tn_chart, rng):
    c = o2_tn_chart
    H = rng.uniform(-5, 5, 300)
    r = np.exp(rng.uniform(-3, 2, 300))
    X = action_coords(c, H, r)
    H2, r2 = invert_many(c, X)
    err = np.linalg.norm(action_coords(c, H2, r2) - X, axis=1)
    assert np.all(err <= 1e-10 * (1 + np.linalg.norm(X, axis=1)))
    assert np.allclose(H2, H, atol=1e-7) and np.allclose(r2, r, rtol=1e-7)


def test_invert_rejects_exterior_point(o2_chart):
    with pytest.raises(PointNotInterior):
        invert(o2_chart, (-1.0, 1.0))


def test_edge_distances_precise_near_edge(o2_chart):
    c = o2_chart
    r = np.array([1e-3, 1e-6, 1e-9])
    H = np.full(3, -0.5)                   # middle of edge 2
    ell = edge_distances(c, H, r)
    naive = edge_values(c.polygon, action_coords(c, H, r))
    assert np.allclose(ell[:, :2], naive[:, :2], rtol=1e-6, atol=1e-15)
    # l_2 vanishes like r^2 and stays resolved far below rounding of x
    assert np.all(ell[:, 1] > 0)
    assert np.allclose(ell[:, 1] / r ** 2, ell[0, 1] / r[0] ** 2, rtol=1e-3)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["o1", "a4", "five"]), st.floats(-10, 10), st.floats(-6, 3),
       st.floats(0.1, 2), st.floats(0.1, 2))
def test_round_trip_property(which, H, logr, s, t):
    P = {"o1": corpus.o_minus(1), "a4": corpus.a_series(4), "five": corpus.five_edge()}[which]
    n1, nd = P.normals[0], P.normals[-1]
    c = make_chart(P, (t * nd[0] - s * n1[0], t * nd[1] - s * n1[1]))
    x = action_coords(c, H, math.exp(logr))
    p = invert(c, x)
    assert np.linalg.norm(action_coords(c, *p) - x) <= 1e-10 * (1 + np.linalg.norm(x))

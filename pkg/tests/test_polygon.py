import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sfk import classify, corpus, normalize_sl2z, validate
from sfk.errors import (BadAdjacentDeterminant, BadGauge, EmptyOrDegenerateRegion,
                        NonPrimitiveNormal, NotStrictlyUnbounded, PointNotInterior, SFKError)
from sfk.polygon import (det2, edge_function, edge_values, guillemin_potential,
                         transform_normals)


def test_o2_is_valid():
    P = validate([(0, 1), (1, 0), (2, -1)], [0, 0, 1])
    assert P.d == 3
    assert np.allclose(P.vertices(), [(0, 0), (0, 1)])


def test_quadrant_is_valid():
    P = validate([(0, 1), (1, 0)], [0, 0])
    assert P.d == 2
    assert classify(P).strictly_unbounded


def test_non_primitive_normal():
    with pytest.raises(NonPrimitiveNormal) as err:
        validate([(0, 1), (2, 0)], [0, 0])
    assert err.value.index == 2


def test_bad_adjacent_determinant():
    with pytest.raises(BadAdjacentDeterminant) as err:
        validate([(0, 1), (1, 0), (3, -2)], [0, 0, 1])
    assert err.value.index == 3 and err.value.value == -2


def test_bad_gauge_and_translation():
    with pytest.raises(BadGauge):
        validate([(0, 1), (1, 0), (2, -1)], [1, 0, 1])
    P = validate([(0, 1), (1, 0), (2, -1)], [1, 2, 6], translate=True)
    assert P.offsets[:2] == (0.0, 0.0)
    assert P.shift == (-2.0, -1.0)
    # lambda_3 moves with the vertex: 2*(-2) - (-1) + 6 = 3
    assert P.offsets[2] == pytest.approx(3.0)


def test_collapsed_bounded_edge_rejected():
    with pytest.raises(EmptyOrDegenerateRegion):
        validate([(0, 1), (1, 0), (2, -1)], [0, 0, 0])


def test_compact_polygon_rejected():
    with pytest.raises(EmptyOrDegenerateRegion):
        validate([(0, 1), (1, 0), (0, -1), (-1, 0)], [0, 0, 2, 2])


def test_rejects_non_integer_normals():
    with pytest.raises(SFKError):
        validate([(0, 1), (0.5, 0)], [0, 0])


def test_s2r2_not_strictly_unbounded():
    cls = classify(corpus.s2r2())
    assert cls.unbounded and not cls.strictly_unbounded


def test_classify_a3_and_o3():
    a3 = validate([(0, 1), (1, 0), (2, -1), (3, -2)], [0, 0, 1, 3])
    assert classify(a3).describe() == "strictly_unbounded, c1_zero=true"
    c = classify(corpus.o_minus(3))
    assert c.strictly_unbounded and not c.c1_zero


def test_edge_function_examples(o2):
    assert edge_function(o2, 3, (0, 0)) == 1
    assert edge_function(corpus.quadrant(), 1, (3, 5)) == 5
    # (t, 2t + 1) lies on E_3 of O(-2)
    assert edge_function(o2, 3, (0.7, 2.4)) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(IndexError):
        edge_function(o2, 4, (0, 0))


def test_guillemin_potential_examples(o2):
    Q = corpus.quadrant()
    assert guillemin_potential(Q, (1.0, 1.0)) == 0.0
    assert guillemin_potential(Q, (math.e, math.e)) == pytest.approx(math.e)
    assert guillemin_potential(o2, (1.0, 1.0)) == pytest.approx(math.log(2))
    with pytest.raises(PointNotInterior):
        guillemin_potential(Q, (-1.0, 1.0))


def test_contains(o2):
    assert o2.contains((1.0, 1.0))
    assert not o2.contains((0.0, 1.0))


def test_normalize_identity_on_standard(o2):
    Pn, M = normalize_sl2z(o2)
    assert M == ((1, 0), (0, 1))
    assert Pn.normals == o2.normals


def test_normalize_recovers_rotated_a2():
    a2 = corpus.a_series(2)
    R = ((0, -1), (1, 0))
    rotated = transform_normals(a2, R)
    assert rotated.normals != a2.normals
    Pn, _ = normalize_sl2z(rotated)
    assert Pn.normals == ((0, 1), (1, 0), (2, -1))


def test_normalize_rejects_parallel_edges():
    with pytest.raises(NotStrictlyUnbounded):
        normalize_sl2z(corpus.s2r2())


@st.composite
def sl2z_matrices(draw):
    # products of the generators S and T^k reach all of SL(2, Z)
    M = np.eye(2, dtype=int)
    for k in draw(st.lists(st.integers(-3, 3), min_size=1, max_size=4)):
        M = M @ np.array([[1, k], [0, 1]]) @ np.array([[0, -1], [1, 0]])
    return tuple(map(tuple, M.tolist()))


@given(sl2z_matrices(), st.sampled_from(["quadrant", "o3", "a3", "five"]))
def test_normalize_undoes_any_sl2z_change(M, which):
    P = {"quadrant": corpus.quadrant(), "o3": corpus.o_minus(3),
         "a3": corpus.a_series(3), "five": corpus.five_edge()}[which]
    moved = transform_normals(P, M)
    Pn, N = normalize_sl2z(moved)
    assert Pn.normals == P.normals
    assert all(det2(n, m) == det2(n2, m2) for (n, m), (n2, m2)
               in zip(zip(P.normals, P.normals[1:]), zip(moved.normals, moved.normals[1:])))


@given(st.floats(0.05, 20), st.floats(0.05, 20))
def test_edge_values_match_scalar_edge_function(x1, x2):
    P = corpus.five_edge()
    vals = edge_values(P, (x1, x2))
    assert np.allclose(vals, [edge_function(P, i, (x1, x2)) for i in range(1, 6)])

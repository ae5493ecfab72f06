import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sfk import build_xi, corpus
from sfk.errors import DomainError, InadmissibleNut, NonIncreasingA
from sfk.harmonic import (NutParameter, extra_det_terms, harmonic_residual, log_solution,
                          log_solution_reflected)


def test_log_solution_values():
    assert log_solution(0, 0.0, 1.0) == 0.0
    assert log_solution(0, 3.0, 4.0) == pytest.approx(0.5 * math.log(8))


def test_log_solution_far_negative_axis():
    H, r = -1e8, 1.0
    val = log_solution(0, H, r)
    # rationalised form: log r - 1/2 log(-H + rho)
    ref = math.log(r) - 0.5 * math.log(-H + math.hypot(H, r))
    assert val == pytest.approx(ref, rel=1e-12)
    assert val == pytest.approx(-0.5 * math.log(2e8), rel=1e-12)


def test_log_solution_domain():
    with pytest.raises(DomainError):
        log_solution(0, -1.0, 0.0)
    with pytest.raises(DomainError):
        log_solution(0, 1.0, -1.0)
    assert log_solution(0, 2.0, 0.0) == pytest.approx(0.5 * math.log(4))


def test_reflected_is_mirror_image():
    assert log_solution_reflected(0.5, 0.2, 0.7) == pytest.approx(log_solution(-0.5, -0.2, 0.7))


def test_residual_of_affine_and_log_r():
    assert harmonic_residual(lambda H, r: 3 * H + 2 + 0 * r, 0.4, 1.0) == pytest.approx(0, abs=1e-6)
    assert harmonic_residual(lambda H, r: np.log(r) + 0 * H, 0.0, 2.0) == pytest.approx(0, abs=1e-6)


def test_log_solution_is_harmonic():
    res = harmonic_residual(lambda H, r: log_solution(1.0, H, r), 0.3, 0.7)
    assert abs(res) < 1e-6


def test_quadrant_xi_at_unit_point():
    P = corpus.quadrant()
    jet = build_xi(P, None, [0.0], 0.0, 1.0)
    assert np.allclose(jet.xi, [0.0, 0.0], atol=1e-15)


def test_o2_xi_at_unit_point(o2):
    jet = build_xi(o2, None, [0.0, 1.0], 0.0, 1.0)
    assert jet.xi[0] == pytest.approx(0.5 * math.log(1 + math.sqrt(2)), rel=1e-14)


def test_xi_rejects_bad_input(o2):
    with pytest.raises(InadmissibleNut) as err:
        build_xi(o2, (-1, 0), [0.0, 1.0], 0.0, 1.0)
    assert "det(nu, nu_1)" in str(err.value)
    with pytest.raises(NonIncreasingA):
        build_xi(o2, None, [1.0, 0.0], 0.0, 1.0)
    with pytest.raises(NonIncreasingA):
        build_xi(o2, None, [0.0], 0.0, 1.0)
    with pytest.raises(DomainError):
        build_xi(o2, None, [0.0, 1.0], 0.0, 0.0)


def test_nut_parameter():
    P = corpus.o_minus(2)
    nu = NutParameter.of((1, -1))
    assert nu.cone_dets(P) == (1.0, 1.0)
    assert nu.is_interior(P)
    assert NutParameter.of(None).is_zero
    edge = NutParameter.of((0, -1))    # along -nu_1: admissible, not interior
    assert edge.is_admissible(P) and not edge.is_interior(P)


def test_extra_terms_nonnegative_for_taubnut(o2, rng):
    H = rng.uniform(-5, 5, 400)
    r = np.exp(rng.uniform(-5, 3, 400))
    terms = extra_det_terms(o2, (1, -1), [0.0, 1.0], H, r)
    assert np.all(terms >= 0)


def test_extra_first_term_flags_bad_nut(o2):
    terms = extra_det_terms(o2, (-1, 0), [0.0, 1.0], 1.0, 0.01)
    assert terms[0] < 0


def test_extra_terms_sum_to_det_difference(o2, rng):
    H = rng.uniform(-5, 5, 200)
    r = np.exp(rng.uniform(-4, 3, 200))
    nu = (0.8, -0.45)
    total = extra_det_terms(o2, nu, [0.0, 1.0], H, r).sum(-1)
    d_nu = build_xi(o2, nu, [0.0, 1.0], H, r).det
    d_0 = build_xi(o2, None, [0.0, 1.0], H, r).det
    assert np.all(np.abs(d_nu - d_0 - total) <= 1e-10 * np.abs(d_nu))


@settings(max_examples=60, deadline=None)
@given(st.floats(-20, 20), st.floats(1e-3, 50), st.floats(-3, 3))
def test_log_solution_harmonic_everywhere(H, r, a):
    # the step shrinks with the distance to the singular ray
    near = min(1.0, r, np.hypot(H + a, r))
    res = harmonic_residual(lambda h, s: log_solution(a, h, s), H, r, h=1e-3 * near)
    assert abs(res) < 1e-4 / near ** 2


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(range(9)), st.floats(-30, 30), st.floats(1e-4, 100),
       st.floats(0.05, 3), st.floats(0.05, 3))
def test_det_dxi_positive(k, H, r, s, t):
    P = [corpus.quadrant(), *[corpus.o_minus(p) for p in range(1, 5)],
         *[corpus.a_series(p) for p in range(2, 5)], corpus.five_edge()][k]
    from sfk.chart import solve_a
    n1, nd = P.normals[0], P.normals[-1]
    nu = (t * nd[0] - s * n1[0], t * nd[1] - s * n1[1])
    for n in (None, nu):
        assert build_xi(P, n, solve_a(P), H, r).det > 0

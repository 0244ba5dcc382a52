import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import average_reference, beta_half, coeff_lists, complex_numbers, fiber_bers_six, pushforward_fft
from velling_lab.diskquad import hyperbolic_grid, make_disk_grid
from velling_lab.errors import BasePointOutsideDisk, BoundaryRadiusNotStrictlyInside, IndexOutOfRange
from velling_lab.metrics import velling_norm_S, wp_norm_series
from velling_lab.schwarzian import QuadDifferential
from velling_lab.series import MobiusMap, TruncatedSeries, binomial_series, coeffs_close, pre_schwarzian, schwarzian
from velling_lab.transport import (
    FiberPoint,
    average_coeff,
    average_coeff_extrapolated,
    average_coeff_reference,
    average_coeffs,
    coeff_a_j_w,
    fiber_series,
    lambda_post_compose,
    qd_pushforward,
    sup_Qw_norm,
    telescoping_closed_form,
    telescoping_partial_sum,
    velling_average_extrapolated,
    velling_average_norm,
    velling_norm_S_fiber,
)

SIX = TruncatedSeries.constant(6, 0)
disk_points = complex_numbers(0.9).filter(lambda w: abs(w) < 0.9)

# ||Q_w||_S^2 for Q = 6 at w = 0, 0.5, 0.9, 0.99 (closed form (1 - |w|^2)^2 (2 - |w|^2))
FIBER_GOLDENS = {0.0: 2.0, 0.5: 0.984375, 0.9: 0.04295900000000001, 0.99: 0.000403890599}


def test_pushforward_examples():
    Q = TruncatedSeries.from_poly([1, 2j, -0.5], 10)
    assert coeffs_close(qd_pushforward(Q, 0), Q)
    for w in (0.5, 0.3 - 0.4j, -0.8j):
        s = 1 - abs(w) ** 2
        ref = binomial_series(-4, np.conj(w), 30) * (6 * s**2)
        assert coeffs_close(qd_pushforward(SIX, w, 30), ref, atol=1e-13)
    assert abs(qd_pushforward(SIX, 0.5, 4).coeffs[0] - 27 / 8) < 4e-15


def test_coefficient_examples():
    Q = QuadDifferential.from_coeffs({2: 0.3, 4: 1j})
    q = Q.to_series()
    for j in (2, 3, 4):
        assert abs(coeff_a_j_w(q, 0, j) - Q.bers[j]) < 1e-15
    for w in (0.5, -0.7, 0.2 + 0.6j):
        assert abs(coeff_a_j_w(SIX, w, 2) - (1 - abs(w) ** 2) ** 2) < 1e-14
    w = 0.6
    assert abs(coeff_a_j_w(SIX, w, 3) + w * (1 - w * w) ** 2) < 1e-14
    with pytest.raises(IndexOutOfRange):
        coeff_a_j_w(SIX, 0.1, 1)


@given(coeff_lists(min_size=1, max_size=7), disk_points)
def test_fiber_coefficients_against_contour_oracle(a, w):
    q = TruncatedSeries.from_poly(a, len(a) - 1)
    ref = pushforward_fft(q.coeffs, w, 16)
    got = qd_pushforward(q, w, 15).coeffs
    scale = 1 + np.max(np.abs(q.coeffs))
    assert np.allclose(got, ref, atol=1e-9 * scale, rtol=0)


@given(coeff_lists(min_size=1, max_size=7), st.lists(disk_points, min_size=1, max_size=6))
def test_batched_fibers_match_scalar_route(a, ws):
    q = TruncatedSeries.from_poly(a, len(a) - 1)
    batch = fiber_series(q, np.array(ws), 12)
    for row, w in zip(batch, ws):
        assert np.allclose(row, qd_pushforward(q, w, 12).coeffs, atol=1e-12, rtol=1e-12)


@given(disk_points, st.integers(2, 9))
def test_six_fiber_closed_form(w, j):
    assert abs(coeff_a_j_w(SIX, w, j) - fiber_bers_six(w, j)) < 1e-13


def test_base_point_checks():
    with pytest.raises(BasePointOutsideDisk):
        FiberPoint(1.0)
    with pytest.raises(BasePointOutsideDisk):
        qd_pushforward(SIX, 1j)
    with pytest.raises(BasePointOutsideDisk):
        fiber_series(SIX, np.array([0.2, 1.5]), 4)
    p = FiberPoint(0.3j, 0.5)
    assert p.gamma(0) == pytest.approx(0.3j) and p.lam(0) == 0


@pytest.mark.parametrize("j", range(2, 7))
def test_six_average_against_beta_integral(j):
    # iint |a_j^w|^2 dA_H = 8 pi int (1 - r^2)^2 r^(2j - 3) dr
    oracle = 8 * math.pi * beta_half(j - 2, 2)
    assert abs(average_coeff_reference(SIX, j) - oracle) < 1e-14 * oracle
    got = average_coeff_extrapolated(SIX, [j])[j].value
    assert abs(got - oracle) < 1e-3 * oracle


def test_average_examples():
    assert abs(average_coeff_extrapolated(SIX, [2])[2].value - 4 * math.pi / 3) < 1e-3 * 4 * math.pi / 3
    q24 = TruncatedSeries.monomial(1, 1, 24)
    assert abs(average_coeff_extrapolated(q24, [2])[2].value - 16 * math.pi / 3) < 1e-3 * 16 * math.pi / 3
    zero = average_coeff_extrapolated(TruncatedSeries.zeros(2), [2, 3])
    assert zero[2].value == 0 and zero[3].value == 0
    g = hyperbolic_grid(0.9)
    assert average_coeff(SIX, 3, g) == average_coeffs(SIX, 3, g)[1]
    with pytest.raises(BoundaryRadiusNotStrictlyInside):
        average_coeffs(SIX, 3, make_disk_grid(8, 8))
    with pytest.raises(IndexOutOfRange):
        average_coeff(SIX, 1, g)


@settings(max_examples=10)
@given(coeff_lists(min_size=1, max_size=5))
def test_averaging_identity(a):
    Q = QuadDifferential.from_bers_list(a)
    q = Q.to_series()
    res = average_coeff_extrapolated(q, range(2, 7))
    for j in range(2, 7):
        ref = average_reference(a, j)
        assert abs(average_coeff_reference(Q, j) - ref) <= 1e-14 * max(ref, 1e-300)
        assert abs(res[j].value - ref) <= 1e-3 * ref


@pytest.mark.parametrize("J", [2, 3, 10, 64, 256, 1000])
def test_telescoping_partial_fractions(J):
    assert abs(telescoping_partial_sum(J) - telescoping_closed_form(J)) < 1e-15
    exact = sum(0.5 * (1 / (j - 1) - 1 / (j + 1)) / 3 for j in range(2, J + 1))
    assert abs(telescoping_closed_form(J) - exact) < 1e-15


def test_telescoping_limit():
    assert abs(telescoping_closed_form(10**7) - 0.25) < 1e-7


def test_velling_average_truncation_matches_telescoping():
    J = 32
    value, runs = velling_average_extrapolated(SIX, J)
    # Q = 6: 1/2 sum_{j<=J} j * 8 pi / (j^3 - j) = 3 pi (1 - 4 (2J + 1) / (6 J (J + 1)))
    exact = 3 * math.pi * (1 - 4 * (2 * J + 1) / (6 * J * (J + 1)))
    assert abs(value - exact) < 1e-4 * exact
    assert all(r.monotone for r in runs)
    assert len(runs[0].partial_sums) == J - 1


@pytest.mark.parametrize("bers", [{2: 1.0}, {3: 1.0}])
def test_velling_average_examples(bers):
    Q = QuadDifferential.from_coeffs(bers)
    value, runs = velling_average_extrapolated(Q.to_series())
    wp = wp_norm_series(Q)
    assert abs(value - wp) < 1e-2 * wp
    assert runs[-1].monotone


def test_velling_average_of_zero_and_guard():
    value, _ = velling_average_extrapolated(TruncatedSeries.zeros(0), 8)
    assert value == 0
    with pytest.raises(IndexOutOfRange):
        velling_average_norm(TruncatedSeries.monomial(5, 5), hyperbolic_grid(0.9), 4)


def test_fiber_norm_goldens():
    ws = list(FIBER_GOLDENS)
    got = velling_norm_S_fiber(SIX, np.array(ws))
    for w, g, v in zip(ws, FIBER_GOLDENS.values(), got):
        closed = (1 - w * w) ** 2 * (2 - w * w)
        assert abs(v - closed) < 1e-12 and abs(v - g) < 1e-12
    # bounded along the radius; golden bound = max sample * 1.1
    assert sup_Qw_norm(SIX, ws) <= 1.1 * 2.0
    assert sup_Qw_norm(TruncatedSeries.zeros(0), [0.3]) == 0
    assert sup_Qw_norm(SIX, [0]) == 2


@settings(max_examples=10)
@given(coeff_lists(min_size=1, max_size=5), complex_numbers(0.4), complex_numbers(0.4))
def test_psu_composition_up_to_rotation(a, w1, w2):
    q = QuadDifferential.from_bers_list(a).to_series()
    two_step = qd_pushforward(qd_pushforward(q, w1, 90), w2, 60)
    w3 = MobiusMap.gamma(w1)(w2)
    one_step = qd_pushforward(q, w3, 60)
    lhs = velling_norm_S(QuadDifferential.from_series(two_step))
    rhs = velling_norm_S(QuadDifferential.from_series(one_step))
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, rhs)


def test_lambda_examples():
    f = TruncatedSeries.from_poly([0, 1, 0.3, -0.1j], 20)
    assert coeffs_close(lambda_post_compose(f, 0), f)
    z = TruncatedSeries.identity(20)
    k = np.arange(20)
    assert coeffs_close(lambda_post_compose(z, 1), np.r_[0, (-1.0) ** k])
    shifted = pre_schwarzian(lambda_post_compose(z, 1j))
    assert abs(shifted.coeffs[0] + 2j) < 1e-15
    g = lambda_post_compose(f, 0.4 - 0.2j)
    assert abs(pre_schwarzian(g).coeffs[0] - (pre_schwarzian(f).coeffs[0] - 2 * (0.4 - 0.2j))) < 1e-14


@given(coeff_lists(min_size=1, max_size=8, bound=0.1), complex_numbers(1.0))
def test_lambda_keeps_schwarzian(tail, c):
    f = TruncatedSeries.from_poly([0, 1] + tail, 30)
    g = lambda_post_compose(f, c)
    # rounding in g is amplified by up to k^3 through the third derivative
    k = np.arange(g.order + 1)
    scale = max(1.0, float(np.max(k**3 * np.abs(g.coeffs))))
    assert coeffs_close(schwarzian(g), schwarzian(f), atol=1e-14 * scale, rtol=1e-11)


def test_fiber_results_independent_of_thread_count(monkeypatch):
    q = TruncatedSeries.from_poly([1, 0.5j, 0.2], 2)
    w = hyperbolic_grid(0.99, 16, 32).z
    runs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("VELLING_LAB_THREADS", threads)
        runs.append(average_coeffs(q, 6, hyperbolic_grid(0.99, 16, 32)))
    assert np.array_equal(runs[0], runs[1])
    assert w.size > 2048

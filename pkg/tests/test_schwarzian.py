import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import coeff_lists, geometric, koebe_schwarzian
from velling_lab.errors import DenominatorVanishesOnGrid
from velling_lab.schwarzian import POLE_GRID, POLE_RADIUS, QuadDifferential, solve_pretheta, solve_schwarzian, tangent_u
from velling_lab.series import TruncatedSeries, coeffs_close, pre_schwarzian, ps_eval, schwarzian

N = 64


def test_zero_gives_identity():
    f = solve_schwarzian(TruncatedSeries.zeros(N), N)
    assert coeffs_close(f, [0, 1]) and f.order == N


def test_small_constant_gives_cubic_term():
    eps = 1e-6
    f = solve_schwarzian(TruncatedSeries.constant(6 * eps, N), N)
    assert abs(f.coeffs[3] - eps) < 1e-11
    assert coeffs_close(tangent_u(QuadDifferential.from_coeffs({2: 1})), [0, 0, 0, 1])


def test_koebe_schwarzian_solves_to_normalized_koebe():
    q = TruncatedSeries(koebe_schwarzian(N))
    f = solve_schwarzian(q, N)
    # z / (1 + z^2): the Koebe function after moving f''(0) to 0
    ref = np.zeros(N + 1, dtype=complex)
    ref[1::4] = 1
    ref[3::4] = -1
    assert coeffs_close(f, ref, atol=1e-12)
    assert coeffs_close(schwarzian(f), q, atol=1e-12)


def test_pole_inside_disk_is_detected():
    r = np.linspace(0.0, POLE_RADIUS, POLE_GRID[0])[40]
    k = (math.pi / (2 * r)) ** 2 / 3  # y2 = cos(sqrt(3k) z) vanishes at z = r
    with pytest.raises(DenominatorVanishesOnGrid) as info:
        solve_schwarzian(TruncatedSeries.constant(6 * k, N), N)
    assert info.value.code == "schwarzian.DenominatorVanishesOnGrid"
    solve_schwarzian(TruncatedSeries.constant(6 * k, N), N, check_poles=False)


@given(coeff_lists(min_size=1, max_size=17))
def test_roundtrip(q):
    Q = TruncatedSeries.from_poly(q, N - 3)
    f = solve_schwarzian(Q, N)
    assert f.coeffs[0] == 0 and f.coeffs[1] == 1 and f.coeffs[2] == 0
    assert coeffs_close(schwarzian(f), Q, atol=1e-12, rtol=1e-12)


@given(coeff_lists(min_size=1, max_size=12))
def test_bers_conversion_roundtrip(a):
    Q = QuadDifferential.from_bers_list(a)
    back = QuadDifferential.from_series(Q.to_series())
    assert np.allclose(back.bers[: Q.max_index + 1], Q.bers, rtol=1e-15, atol=0)
    n = np.arange(2, Q.max_index + 1)
    assert np.array_equal(Q.to_series().coeffs[: n.size], (n**3 - n) * Q.bers[2:])


@given(coeff_lists(min_size=1, max_size=6, bound=1.0))
def test_linearization_against_tangent(a):
    Q = QuadDifferential.from_bers_list(a)
    q = Q.to_series()
    u = tangent_u(Q, 12)
    t = 1e-3

    def slope(t):
        # central difference: the error is even in t
        plus = solve_schwarzian(q * t, 12, check_poles=False).coeffs
        minus = solve_schwarzian(q * -t, 12, check_poles=False).coeffs
        return (plus - minus) / (2 * t)

    rich = (4 * slope(t / 2) - slope(t)) / 3
    scale = 1 + np.max(np.abs(q.coeffs)) ** 3
    assert np.allclose(rich[3:], u.coeffs[3:13], atol=1e-6 * scale)


def test_tangent_examples():
    assert np.all(tangent_u(QuadDifferential.from_coeffs({})).coeffs == 0)
    u = tangent_u(QuadDifferential.from_coeffs({3: 2}))
    assert coeffs_close(u, [0, 0, 0, 0, 2])
    # u''' = Q
    Q = QuadDifferential.from_coeffs({3: 2})
    assert coeffs_close(u.derivative().derivative().derivative(), Q.to_series(), atol=1e-14)
    ext = tangent_u(QuadDifferential.from_coeffs({1: 1}))
    assert coeffs_close(ext, [0, 0, 1])


def test_pretheta_examples():
    assert coeffs_close(solve_pretheta(TruncatedSeries.zeros(20)), [0, 1])
    f = solve_pretheta(TruncatedSeries(2 * geometric(20)))
    assert coeffs_close(f, np.r_[0, geometric(21)])
    e = solve_pretheta(TruncatedSeries.constant(1, 20))
    ref = np.array([0] + [1 / math.factorial(k) for k in range(1, 23)])
    assert coeffs_close(e, ref)


@given(coeff_lists(min_size=1, max_size=17))
def test_theta_roundtrip(psi):
    p = TruncatedSeries.from_poly(psi, 30)
    assert coeffs_close(pre_schwarzian(solve_pretheta(p)), p, atol=1e-12, rtol=1e-12)


def test_quad_differential_validation():
    with pytest.raises(ValueError):
        QuadDifferential(np.array([1.0, 0, 1]))
    with pytest.raises(ValueError):
        QuadDifferential.from_coeffs({0: 1})
    Q = QuadDifferential.from_coeffs({2: 1, 3: 1j})
    assert Q.max_index == 3 and Q.a1 == 0
    assert abs(ps_eval(Q.to_series(), 0.5) - (6 + 24j * 0.5)) < 1e-14

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import beta_half, coeff_lists, complex_numbers
from velling_lab.diskquad import make_disk_grid
from velling_lab.errors import PerturbationTooLarge
from velling_lab.metrics import (
    FourierVector,
    MobiusComponentIgnored,
    almost_complex_J,
    bers_from_fourier,
    d0B,
    d0W,
    metric_family,
    second_variation_family,
    second_variation_numeric,
    sobolev_norm,
    velling_norm_S,
    vk_norm,
    wp_norm_integral,
    wp_norm_series,
)
from velling_lab.schwarzian import QuadDifferential, tangent_u
from velling_lab.series import TruncatedSeries, coeffs_close
from velling_lab.transport import qd_pushforward

GRID = make_disk_grid(64, 256)


def fv(d):
    return FourierVector.from_coeffs(d)


def test_velling_norm_examples():
    assert velling_norm_S(QuadDifferential.from_coeffs({})) == 0
    assert velling_norm_S(QuadDifferential.from_coeffs({2: 1})) == 2
    assert velling_norm_S(QuadDifferential.from_coeffs({2: 1, 3: 1j})) == 5


def test_vk_norm_examples():
    assert vk_norm(fv({2: 0.5})) == 0.5
    assert vk_norm(fv({1: 1})) == 1
    assert vk_norm(fv({})) == 0
    theta = np.linspace(0, 2 * np.pi, 7)
    assert np.allclose(fv({2: 0.5})(theta), np.cos(2 * theta))


def test_metric_family_examples():
    v = fv({2: 1, 5: 0.3j})
    assert metric_family(0, 1, v) == vk_norm(v)
    assert abs(metric_family(math.pi / 2, -math.pi / 2, fv({2: 1})) - 3 * math.pi) < 1e-14
    assert metric_family(0, 0, v) == 0


def test_wp_examples():
    assert abs(wp_norm_series(QuadDifferential.from_coeffs({2: 1})) - 3 * math.pi) < 1e-14
    assert abs(wp_norm_series(QuadDifferential.from_coeffs({3: 1})) - 12 * math.pi) < 1e-14
    assert wp_norm_series(QuadDifferential.from_coeffs({})) == 0
    six = TruncatedSeries.constant(6, 0)
    # 1/4 * 36 * 2 pi * int (1 - r^2)^2 r dr
    assert abs(wp_norm_integral(six, GRID) - 0.25 * 36 * 2 * math.pi * beta_half(0, 2)) < 1e-12
    assert abs(wp_norm_integral(six, GRID) - 3 * math.pi) < 1e-10 * 3 * math.pi
    assert wp_norm_integral(TruncatedSeries.zeros(3), GRID) == 0
    assert abs(wp_norm_integral(TruncatedSeries.monomial(1, 1, 24), GRID) - 12 * math.pi) < 1e-10 * 12 * math.pi


def test_tangent_maps_examples():
    assert coeffs_close(d0W(fv({2: 1})), [0, 0, 0, 1j])
    assert coeffs_close(d0W(fv({1: -1j})), [0, 0, 1])
    assert np.all(d0W(fv({})).coeffs == 0)
    assert coeffs_close(d0B(fv({2: 1})), [6j])
    assert coeffs_close(d0B(fv({3: 1})), [0, 24j])
    assert np.all(d0B(fv({})).coeffs == 0)


def test_d0B_warns_on_mobius_component_and_keeps_it():
    v = fv({1: 2.0, 2: 1})
    with pytest.warns(MobiusComponentIgnored):
        q = d0B(v)
    assert coeffs_close(q, [6j])
    assert v.coeffs[1] == 2.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        d0B(fv({2: 1}))


def test_almost_complex_structure_examples():
    theta = np.linspace(0, 2 * np.pi, 9)
    for n in (1, 2, 5):
        v = fv({n: 0.5})
        assert np.allclose(almost_complex_J(v)(theta), -np.sin(n * theta))
    v = fv({2: 1 + 2j, 4: -0.5})
    assert np.array_equal(almost_complex_J(almost_complex_J(v)).coeffs, -v.coeffs)
    assert np.all(almost_complex_J(fv({})).coeffs == 0)


def test_sobolev_examples():
    assert sobolev_norm(fv({1: 1}), 0) == 2
    assert sobolev_norm(fv({2: 1}), 1.5) == 16
    assert sobolev_norm(fv({}), 1) == 0


def test_fourier_vector_validation():
    with pytest.raises(ValueError):
        FourierVector(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        FourierVector.from_coeffs({0: 1})
    v = fv({3: 1j})
    assert np.isrealobj(v(np.array([0.1, 0.2])))


@given(coeff_lists(min_size=1, max_size=12))
def test_vk_matches_bers_of_d0W(c):
    v = FourierVector(np.r_[0, c])
    u = d0W(v)
    n = np.arange(1, v.max_index + 1)
    assert abs(vk_norm(v) - np.sum(n * np.abs(u.coeffs[2 : v.max_index + 2]) ** 2)) < 1e-13 * (1 + vk_norm(v))
    assert vk_norm(almost_complex_J(v)) == vk_norm(v)
    assert velling_norm_S(bers_from_fourier(v)) == vk_norm(v)


@given(coeff_lists(min_size=1, max_size=15))
def test_wp_series_matches_integral(a):
    Q = QuadDifferential.from_bers_list(a)
    s = wp_norm_series(Q)
    assert abs(wp_norm_integral(Q.to_series(), GRID) - s) <= 1e-10 * max(s, 1e-300)


@settings(max_examples=10)
@given(coeff_lists(min_size=1, max_size=5), complex_numbers(0.5).filter(lambda w: abs(w) <= 0.5))
def test_wp_invariant_under_disk_automorphisms(a, w):
    Q = QuadDifferential.from_bers_list(a).to_series()
    Qw = qd_pushforward(Q, w, 80)
    base = wp_norm_integral(Q, GRID)
    assert abs(wp_norm_integral(Qw, GRID) - base) <= 1e-6 * base


@given(coeff_lists(min_size=1, max_size=10), st.floats(0, 2 * math.pi))
def test_velling_norm_rotation_invariance(a, alpha):
    Q = QuadDifferential.from_bers_list(a)
    q = Q.to_series()
    k = np.arange(q.order + 1)
    rotated = TruncatedSeries(q.coeffs * np.exp(1j * alpha * k) * np.exp(2j * alpha))
    assert abs(velling_norm_S(QuadDifferential.from_series(rotated)) - velling_norm_S(Q)) < 1e-12 * (1 + velling_norm_S(Q))


@pytest.mark.parametrize(
    "u, ref",
    [
        (TruncatedSeries.monomial(2, 8), 2 * math.pi),
        (TruncatedSeries.monomial(3, 8), 4 * math.pi),
    ],
)
def test_second_variation_examples(u, ref):
    sv = second_variation_numeric(u, GRID)
    assert abs(sv.value - ref) < 1e-4 * ref
    assert abs(sv.first_difference) < 1e-6
    assert sv.steps == (1e-2, 5e-3)


def test_second_variation_of_zero():
    sv = second_variation_numeric(TruncatedSeries.zeros(8), GRID)
    assert sv.value == 0 and sv.first_difference == 0


def test_second_variation_family_bers_case():
    sv = second_variation_family(TruncatedSeries.constant(6, 64), GRID)
    assert abs(sv.value - 4 * math.pi) < 1e-3 * 4 * math.pi


def test_second_variation_guards():
    with pytest.raises(ValueError):
        second_variation_numeric(TruncatedSeries.identity(4), GRID)
    with pytest.raises(PerturbationTooLarge):
        second_variation_numeric(TruncatedSeries.monomial(3, 4, 100), GRID)
    with pytest.raises(PerturbationTooLarge):
        second_variation_family(TruncatedSeries.constant(6e3, 16), GRID, order=16)


def _bounded_quad(a):
    # ||Q||_{oo,2} <= sup |Q| <= sum (n^3 - n) |a_n|; scale to at most 1
    Q = QuadDifferential.from_bers_list(a)
    n = np.arange(2, Q.max_index + 1)
    mass = np.sum((n**3 - n) * np.abs(Q.bers[2:]))
    return QuadDifferential(Q.bers / mass) if mass > 1 else Q


@settings(max_examples=8)
@given(coeff_lists(min_size=1, max_size=7).filter(lambda a: max(abs(x) for x in a) > 1e-3))
def test_second_variation_theorem(a):
    Q = _bounded_quad(a)
    ref = 2 * math.pi * velling_norm_S(Q)
    sv = second_variation_numeric(tangent_u(Q, 12), GRID)
    assert abs(sv.value - ref) < 1e-3 * ref
    assert abs(sv.first_difference) < 1e-6

"""Transport of quadratic differentials along the disk automorphisms
``gamma_w(z) = (z + w) / (1 + conj(w) z)`` and the fiber averages built on it.

``Q_w = Q(gamma_w) gamma_w'^2`` is recomputed as a full Taylor series at
every base point: ``Q`` is re-centred at ``w`` (a Taylor shift, exact for
polynomials), composed with ``gamma_w(z) - w`` and multiplied by
``gamma_w'(z)^2``.  The base points of a quadrature grid are processed as one
batch through the ndarray kernels of :mod:`velling_lab.series`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._parallel import parallel_map_nodes
from .diskquad import DiskGrid, hyperbolic_grid, hyperbolic_weight, pairwise_sum, richardson_linear
from .errors import BasePointOutsideDisk, BoundaryRadiusNotStrictlyInside, IndexOutOfRange
from .schwarzian import QuadDifferential
from .series import (
    MobiusMap,
    TruncatedSeries,
    _compose_poly,
    _mul,
    mobius_conjugate,
    taylor_shift,
)


@dataclass(frozen=True)
class FiberPoint:
    """A point of the fiber over the origin.

    ``w`` parametrizes the fiber through ``gamma_w`` (the exterior-disk
    parameter ``sigma_w`` after ``w -> 1/w``); ``c`` is the normalizing
    parameter of ``lambda(z) = z / (c z + 1)``, equal to ``-1/g(w)`` when the
    exterior map ``g`` is known.
    """

    w: complex
    c: complex = 0j

    def __post_init__(self):
        if not abs(self.w) < 1:
            raise BasePointOutsideDisk(f"|w| = {abs(self.w)} is not < 1")

    @property
    def gamma(self) -> MobiusMap:
        return MobiusMap.gamma(self.w)

    @property
    def lam(self) -> MobiusMap:
        return MobiusMap.lam(self.c)


def _check_base_points(w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w) >= 1):
        raise BasePointOutsideDisk("base points must satisfy |w| < 1")
    return w


def gamma_inner_arrays(w: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Batched ``gamma_w(z) - w`` and ``gamma_w'(z)^2`` coefficient arrays.

    Both are geometric-type expansions in ``-conj(w) z``:
    ``gamma_w(z) - w = (1 - |w|^2) z / (1 + conj(w) z)`` and
    ``gamma_w'(z)^2 = (1 - |w|^2)^2 / (1 + conj(w) z)^4``.
    """
    w = np.asarray(w, dtype=complex)
    k = np.arange(order + 1)
    s = 1.0 - np.abs(w) ** 2
    powers = (-np.conj(w))[..., None] ** k
    shift = np.zeros(w.shape + (order + 1,), dtype=complex)
    if order >= 1:
        shift[..., 1:] = s[..., None] * powers[..., :-1]
    binom = (k + 1) * (k + 2) * (k + 3) / 6.0
    dsq = (s**2)[..., None] * binom * powers
    return shift, dsq


def _pushforward_arrays(Q: TruncatedSeries, w: np.ndarray, order: int) -> np.ndarray:
    shifted = taylor_shift(Q, w)
    inner, dsq = gamma_inner_arrays(w, order)
    return _mul(_compose_poly(shifted, inner, order), dsq, order)


def qd_pushforward(Q: TruncatedSeries, w: complex, order: int | None = None) -> TruncatedSeries:
    """Taylor series of ``Q(gamma_w(z)) gamma_w'(z)^2`` about 0.

    ``Q`` is read as a polynomial; the Mobius expansions come from
    :func:`mobius_conjugate`.
    """
    w = complex(w)
    if not abs(w) < 1:
        raise BasePointOutsideDisk(f"|w| = {abs(w)} is not < 1")
    if order is None:
        order = Q.order
    M = MobiusMap.gamma(w)
    image, dsq = mobius_conjugate(TruncatedSeries.zeros(order), M, "qd_pushforward_inner")
    inner = image.coeffs.copy()
    inner[0] = 0.0
    shifted = taylor_shift(Q, w)
    return TruncatedSeries(_mul(_compose_poly(shifted, inner, order), dsq.coeffs, order))


def fiber_series(Q: TruncatedSeries, w, order: int) -> np.ndarray:
    """Coefficients of ``Q_w`` for an array of base points (rows follow ``w``)."""
    w = _check_base_points(w)
    flat = w.reshape(-1)
    out = parallel_map_nodes(lambda ws: _pushforward_arrays(Q, ws, order), flat, chunk=512)
    return out.reshape(w.shape + (order + 1,))


def bers_weights(j_max: int) -> np.ndarray:
    j = np.arange(2, j_max + 1, dtype=float)
    return j**3 - j


def coeff_a_j_w(Q: TruncatedSeries, w: complex, j: int) -> complex:
    """``j``-th Bers coefficient of ``Q_w``."""
    if j < 2:
        raise IndexOutOfRange(f"Bers coefficients start at j = 2, got {j}")
    series = qd_pushforward(Q, w, j - 2)
    return complex(series.coeffs[j - 2] / (j**3 - j))


def bers_coefficients_on_grid(Q: TruncatedSeries, grid_points, j_max: int) -> np.ndarray:
    """``a_j^w`` for ``j = 2..j_max``; shape ``(len(points), j_max - 1)``."""
    if j_max < 2:
        raise IndexOutOfRange("j_max must be >= 2")
    series = fiber_series(Q, grid_points, j_max - 2)
    return series / bers_weights(j_max)


def average_coeff_reference(Q: QuadDifferential | TruncatedSeries, j: int) -> float:
    """``4 pi / (3 (j^3 - j)) * sum (n^3 - n) |a_n|^2``."""
    if isinstance(Q, TruncatedSeries):
        Q = QuadDifferential.from_series(Q)
    n = np.arange(2, Q.max_index + 1, dtype=float)
    total = float(pairwise_sum((n**3 - n) * np.abs(Q.bers[2:]) ** 2))
    return 4.0 * math.pi / (3.0 * (j**3 - j)) * total


def _hyperbolic_column_integrals(values: np.ndarray, grid: DiskGrid) -> np.ndarray:
    w = grid.weights * hyperbolic_weight(grid.r)
    return pairwise_sum(values * w[:, None], axis=0)


def average_coeffs(Q: TruncatedSeries, j_max: int, grid: DiskGrid) -> np.ndarray:
    """``iint |a_j^w|^2 dA_H`` over the grid for ``j = 2..j_max``."""
    if grid.r_max >= 1.0:
        raise BoundaryRadiusNotStrictlyInside("hyperbolic averages need r_max < 1")
    a = bers_coefficients_on_grid(Q, grid.z, j_max)
    return _hyperbolic_column_integrals(np.abs(a) ** 2, grid)


def average_coeff(Q: TruncatedSeries, j: int, grid: DiskGrid) -> float:
    """``iint |a_j^w|^2 4 dxdy / (1 - |w|^2)^2`` over the grid's disk."""
    if j < 2:
        raise IndexOutOfRange(f"Bers coefficients start at j = 2, got {j}")
    return float(average_coeffs(Q, j, grid)[j - 2])


@dataclass(frozen=True)
class Extrapolated:
    value: float
    samples: tuple[float, ...]
    radii: tuple[float, ...]


def _extrapolate(samples: Sequence[float], radii: Sequence[float]) -> float:
    if len(radii) == 1:
        return float(samples[0])
    return float(richardson_linear(1 - radii[-2], samples[-2], 1 - radii[-1], samples[-1]))


def average_coeff_extrapolated(
    Q: TruncatedSeries,
    j_values: Sequence[int],
    radii: Sequence[float] = (0.99, 0.999),
    n_radial: int = 24,
    n_angular: int | None = None,
) -> dict[int, Extrapolated]:
    """Fiber averages on boundary-refined grids, extrapolated in ``1 - r_max``."""
    j_max = max(j_values)
    if n_angular is None:
        n_angular = _angular_nodes(Q)
    per_radius = []
    for rp in radii:
        grid = hyperbolic_grid(rp, n_radial, n_angular)
        per_radius.append(average_coeffs(Q, j_max, grid))
    out = {}
    for j in j_values:
        samples = [float(v[j - 2]) for v in per_radius]
        out[j] = Extrapolated(_extrapolate(samples, radii), tuple(samples), tuple(radii))
    return out


def _angular_nodes(Q: TruncatedSeries) -> int:
    # |a_j^w|^2 is a trigonometric polynomial of degree <= 2 deg(Q) in arg(w)
    return max(16, 4 * (Q.degree + 1))


@dataclass(frozen=True)
class VellingAverage:
    value: float
    partial_sums: tuple[float, ...]
    j_max: int
    last_term: float

    @property
    def monotone(self) -> bool:
        p = np.asarray(self.partial_sums)
        inc = np.diff(p)
        return bool(np.all(inc >= 0) and np.all(np.diff(inc) <= 0))


def velling_average_norm(Q: TruncatedSeries, grid: DiskGrid, j_max: int = 256) -> VellingAverage:
    """``1/2 iint sum_{j<=j_max} j |a_j^w|^2 dA_H`` with cumulative partial sums."""
    if j_max < Q.degree + 2:
        raise IndexOutOfRange(f"j_max = {j_max} does not reach the degree of Q")
    averages = average_coeffs(Q, j_max, grid)
    j = np.arange(2, j_max + 1)
    terms = 0.5 * j * averages
    partial = np.cumsum(terms)
    return VellingAverage(float(pairwise_sum(terms)), tuple(float(x) for x in partial), j_max, float(terms[-1]))


def velling_average_extrapolated(
    Q: TruncatedSeries,
    j_max: int = 256,
    radii: Sequence[float] = (0.999, 0.9999),
    n_radial: int = 24,
    n_angular: int | None = None,
) -> tuple[float, list[VellingAverage]]:
    if n_angular is None:
        n_angular = _angular_nodes(Q)
    runs = [velling_average_norm(Q, hyperbolic_grid(rp, n_radial, n_angular), j_max) for rp in radii]
    return _extrapolate([r.value for r in runs], radii), runs


def telescoping_partial_sum(J: int) -> float:
    """``sum_{j=2..J} 1 / (3 (j-1)(j+1))`` summed term by term."""
    j = np.arange(2, J + 1, dtype=float)
    return float(pairwise_sum(1.0 / (3.0 * (j - 1) * (j + 1))))


def telescoping_closed_form(J: int) -> float:
    return 0.25 - (2 * J + 1) / (6.0 * J * (J + 1))


def sup_Qw_norm(Q: TruncatedSeries, w_samples: Sequence[complex], order: int | None = None) -> float:
    """``max_w sum_j j |a_j^w|^2`` over the samples.

    Without ``order`` the series length is chosen so ``|w|^order`` is
    negligible for the largest sample.
    """
    w = _check_base_points(np.atleast_1d(np.asarray(w_samples, dtype=complex)))
    return float(np.max(velling_norm_S_fiber(Q, w, order)))


def velling_norm_S_fiber(Q: TruncatedSeries, w, order: int | None = None) -> np.ndarray:
    """``||Q_w||_S^2`` for each base point."""
    w = _check_base_points(np.atleast_1d(np.asarray(w, dtype=complex)))
    if order is None:
        rho = float(np.max(np.abs(w))) if w.size else 0.0
        order = Q.degree + 16
        if rho > 0:
            order += int(math.ceil(math.log(1e-13) / math.log(rho)))
        order = min(order, 8192)
    series = np.stack([qd_pushforward(Q, wk, order).coeffs for wk in w])
    j = np.arange(2, order + 3, dtype=float)
    a = series / (j**3 - j)
    return pairwise_sum((j * np.abs(a) ** 2).T, axis=0)


def lambda_post_compose(f: TruncatedSeries, c: complex) -> TruncatedSeries:
    """``f / (c f + 1)``: keeps ``f(0) = 0, f'(0) = 1`` and lowers ``f''(0)/2`` by ``c``."""
    return mobius_conjugate(f, MobiusMap.lam(c), "post_compose")


__all__ = [
    "FiberPoint",
    "qd_pushforward",
    "fiber_series",
    "coeff_a_j_w",
    "bers_coefficients_on_grid",
    "average_coeff",
    "average_coeffs",
    "average_coeff_reference",
    "average_coeff_extrapolated",
    "velling_average_norm",
    "velling_average_extrapolated",
    "VellingAverage",
    "telescoping_partial_sum",
    "telescoping_closed_form",
    "sup_Qw_norm",
    "velling_norm_S_fiber",
    "lambda_post_compose",
    "gamma_inner_arrays",
]

"""Tensor-product quadrature on disks ``|z| <= r_max`` and the integral
functionals built on it (spherical area, hyperbolic integrals, radial
moment identities, the regularized hyperbolic average).

Radial nodes are Gauss-Legendre on panels, angular nodes are equispaced
(the trapezoid rule, exact for ``e^{ik theta}`` with ``0 < |k| < n_angular``).
All reductions over nodes go through :func:`pairwise_sum`, whose fixed
reduction tree makes results independent of how the evaluation was chunked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from ._parallel import parallel_map_nodes
from .errors import (
    BoundaryRadiusNotStrictlyInside,
    InvalidGridShape,
    MomentListTooShort,
    NonConvergentSequence,
)
from .series import TruncatedSeries, ps_eval, ps_eval_with_derivative


def pairwise_sum(x, axis: int = 0):
    """Deterministic tree summation along ``axis``.

    Adjacent pairs are added level by level (an odd tail is carried up
    unchanged), so the rounding pattern depends only on the length.
    """
    x = np.moveaxis(np.asarray(x), axis, 0)
    if x.shape[0] == 0:
        return np.zeros(x.shape[1:], dtype=x.dtype)[()]
    while x.shape[0] > 1:
        n = x.shape[0]
        head = x[0 : n - n % 2 : 2] + x[1 : n - n % 2 : 2]
        x = np.concatenate([head, x[n - 1 :]]) if n % 2 else head
    return x[0][()]


def gauss_legendre(n: int, a: float = 0.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def panel_breaks(r_max: float, boundary_panels: int) -> np.ndarray:
    """``0, r_max/2, 3 r_max/4, ..., r_max (1 - 2^-K), r_max``."""
    inner = [r_max * (1.0 - 2.0**-k) for k in range(1, boundary_panels + 1)]
    return np.array([0.0] + inner + [r_max])


def panels_for_radius(r_max: float, minimum: int = 0) -> int:
    """Enough geometric panels that the last one is no wider than ``1 - r_max``."""
    if r_max >= 1.0:
        return max(minimum, 12)
    return max(minimum, int(math.ceil(math.log2(r_max / (1.0 - r_max)))) + 1)


@dataclass(frozen=True, eq=False)
class DiskGrid:
    n_radial: int
    n_angular: int
    r_max: float
    boundary_panels: int
    r: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    panels: np.ndarray = field(repr=False)

    @property
    def z(self) -> np.ndarray:
        return self.r * np.exp(1j * self.theta)

    @property
    def size(self) -> int:
        return self.weights.size

    def integrate(self, values) -> float:
        """``sum values * weights`` with pairwise summation (complex input allowed)."""
        return pairwise_sum(np.asarray(values) * self.weights)


def make_disk_grid(n_radial: int = 32, n_angular: int = 64, r_max: float = 1.0, boundary_panels: int = 0) -> DiskGrid:
    if not (isinstance(n_radial, (int, np.integer)) and n_radial >= 2):
        raise InvalidGridShape(f"n_radial must be an integer >= 2, got {n_radial!r}")
    if not (isinstance(n_angular, (int, np.integer)) and n_angular >= 4):
        raise InvalidGridShape(f"n_angular must be an integer >= 4, got {n_angular!r}")
    if not (0.0 < r_max <= 1.0):
        raise InvalidGridShape(f"r_max must lie in (0, 1], got {r_max!r}")
    if boundary_panels < 0:
        raise InvalidGridShape("boundary_panels must be >= 0")
    breaks = panel_breaks(r_max, boundary_panels)
    rs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        x, w = gauss_legendre(n_radial, a, b)
        rs.append(x)
        ws.append(w)
    r1 = np.concatenate(rs)
    wr = np.concatenate(ws) * r1
    theta1 = 2.0 * np.pi * np.arange(n_angular) / n_angular
    wt = 2.0 * np.pi / n_angular
    r = np.repeat(r1, n_angular)
    theta = np.tile(theta1, r1.size)
    weights = np.repeat(wr, n_angular) * wt
    for arr in (r, theta, weights, breaks):
        arr.setflags(write=False)
    return DiskGrid(n_radial, n_angular, float(r_max), int(boundary_panels), r, theta, weights, breaks)


def hyperbolic_grid(r_max: float, n_radial: int = 24, n_angular: int = 32) -> DiskGrid:
    """Grid with boundary panels sized for the ``(1 - r^2)^-2`` weight."""
    return make_disk_grid(n_radial, n_angular, r_max, panels_for_radius(r_max))


def _sample(h, grid: DiskGrid) -> np.ndarray:
    if callable(h):
        return parallel_map_nodes(h, grid.z)
    h = np.asarray(h)
    if h.ndim == 0:
        return np.full(grid.size, h)
    if h.shape[0] != grid.size:
        raise ValueError(f"sampled function has {h.shape[0]} values for a grid of {grid.size} nodes")
    return h


def spherical_area(f: TruncatedSeries, grid: DiskGrid) -> float:
    """``4 * iint |f'|^2 / (1 + |f|^2)^2 dx dy`` over the grid's disk."""
    def integrand(z):
        val, der = ps_eval_with_derivative(f, z)
        return 4.0 * np.abs(der) ** 2 / (1.0 + np.abs(val) ** 2) ** 2

    return float(grid.integrate(parallel_map_nodes(integrand, grid.z)))


def radial_pair_integrals(f: TruncatedSeries, phi_moments: Sequence[float]) -> tuple[float, float]:
    """Coefficient side of the two radial integral identities.

    ``phi_moments[k]`` must be ``int_0^1 phi(r) r^k dr``.  Returns

    * ``iint phi(|z|) Re f dxdy = 2 pi Re(a_0) * phi_moments[1]``
    * ``iint phi(|z|) |f|^2 dxdy = 2 pi sum |a_n|^2 * phi_moments[2n+1]``

    The first identity is stated with the area element ``r dr``; the bare
    ``int phi(r) dr`` form disagrees with direct quadrature already for
    ``phi = 1, f = 1`` (``pi`` versus ``2 pi``).
    """
    need = 2 * f.order + 2
    if len(phi_moments) < need:
        raise MomentListTooShort(f"need {need} moments for order {f.order}, got {len(phi_moments)}")
    m = np.asarray(phi_moments, dtype=float)
    re_side = 2.0 * np.pi * f.coeffs[0].real * m[1]
    n = np.arange(f.order + 1)
    abs_side = 2.0 * np.pi * float(pairwise_sum(np.abs(f.coeffs) ** 2 * m[2 * n + 1]))
    return float(re_side), abs_side


def radial_moments(phi: Callable[[np.ndarray], np.ndarray], count: int, n_nodes: int = 128) -> np.ndarray:
    """``[int_0^1 phi(r) r^k dr for k < count]`` by Gauss-Legendre."""
    x, w = gauss_legendre(n_nodes)
    fx = phi(x) * w
    return np.array([float(pairwise_sum(fx * x**k)) for k in range(count)])


def c_frak_integrand(n: int, r):
    r2 = r * r
    q = 1.0 + r2
    return (6 * r2 ** (n + 2) / q**4 - (4 * n + 6) * r2 ** (n + 1) / q**3 + (n + 1) ** 2 * r2**n / q**2) * r


def c_frak(n: int, grid_1d: Sequence[tuple[float, float]] | None = None) -> float:
    """Radial coefficient of the second variation of spherical area (equals n/8)."""
    if n < 1:
        raise ValueError("c_frak is defined for n >= 1")
    if grid_1d is None:
        x, w = gauss_legendre(64)
    else:
        pairs = np.asarray(grid_1d, dtype=float)
        x, w = pairs[:, 0], pairs[:, 1]
    return float(pairwise_sum(c_frak_integrand(n, x) * w))


def hyperbolic_weight(r):
    return 4.0 / (1.0 - r * r) ** 2


def hyperbolic_integral(h, grid: DiskGrid) -> float:
    """``iint h dA_H`` with ``dA_H = 4 dxdy / (1 - |z|^2)^2``.

    ``h`` is either a callable of ``z`` (vectorized) or its samples on the
    grid nodes.  Complex samples are integrated as complex numbers.
    """
    if grid.r_max >= 1.0:
        raise BoundaryRadiusNotStrictlyInside(f"hyperbolic measure diverges at r_max = {grid.r_max}")
    vals = _sample(h, grid)
    total = grid.integrate(vals * hyperbolic_weight(grid.r))
    return float(total) if np.isrealobj(total) or np.imag(total) == 0 else complex(total)


def hyperbolic_area(r_max: float) -> float:
    """Closed form ``4 pi r^2 / (1 - r^2)`` of ``Area_H(|z| < r_max)``."""
    return 4.0 * np.pi * r_max**2 / (1.0 - r_max**2)


def richardson_linear(x1: float, v1: float, x2: float, v2: float) -> float:
    """Eliminate ``C`` from ``v = L + C x`` sampled at two points."""
    return (x1 * v2 - x2 * v1) / (x1 - x2)


@dataclass(frozen=True)
class RegularizedLimit:
    value: float
    ratios: tuple[float, ...]
    radii: tuple[float, ...]

    @property
    def last_two(self) -> tuple[float, float]:
        return self.ratios[-2], self.ratios[-1]


def regularized_limit(
    h,
    radii: Sequence[float],
    normalizer: float,
    tol: float = 5e-2,
    n_radial: int = 24,
    n_angular: int = 32,
) -> RegularizedLimit:
    """Limit of ``normalizer * iint_{r'} h dA_H / iint_{r'} dA_H`` as ``r' -> 1``.

    The ratio is modelled as ``L + C (1 - r')`` and the last two radii are
    used to eliminate ``C``.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 2 or any(b <= a for a, b in zip(radii, radii[1:])) or radii[-1] >= 1.0:
        raise ValueError("radii must be strictly ascending, at least two, and below 1")
    ratios = []
    for rp in radii:
        grid = hyperbolic_grid(rp, n_radial, n_angular)
        num = hyperbolic_integral(h, grid)
        den = hyperbolic_integral(1.0, grid)
        ratios.append(normalizer * num / den)
    r1, r2 = ratios[-2], ratios[-1]
    if abs(r2 - r1) > tol:
        raise NonConvergentSequence(f"successive ratios {r1!r} and {r2!r} differ by more than {tol}")
    value = richardson_linear(1.0 - radii[-2], r1, 1.0 - radii[-1], r2)
    return RegularizedLimit(float(np.real(value)), tuple(float(np.real(x)) for x in ratios), tuple(radii))


def gamma_ratio_series(Q, alpha: float) -> float:
    """``pi sum (n^3-n)^2 Gamma(5-alpha) Gamma(n-1) / Gamma(4+n-alpha) |a_n|^2``."""
    total = []
    for n in range(2, Q.max_index + 1):
        a = Q.bers[n]
        if a == 0:
            continue
        log_ratio = math.lgamma(5 - alpha) + math.lgamma(n - 1) - math.lgamma(4 + n - alpha)
        total.append((n**3 - n) ** 2 * math.exp(log_ratio) * abs(a) ** 2)
    return math.pi * float(pairwise_sum(np.array(total))) if total else 0.0


def gamma_ratio_quadrature(Q, alpha: float, grid: DiskGrid) -> float:
    """``iint |Q (1-|z|^2)^2|^2 (1-|z|^2)^(-alpha) dxdy`` by quadrature."""
    q = Q.to_series()
    vals = np.abs(ps_eval(q, grid.z)) ** 2 * (1.0 - grid.r**2) ** (4.0 - alpha)
    return float(grid.integrate(vals))


__all__ = [
    "DiskGrid",
    "make_disk_grid",
    "hyperbolic_grid",
    "pairwise_sum",
    "gauss_legendre",
    "spherical_area",
    "radial_pair_integrals",
    "radial_moments",
    "c_frak",
    "hyperbolic_integral",
    "hyperbolic_area",
    "regularized_limit",
    "RegularizedLimit",
    "richardson_linear",
    "gamma_ratio_series",
    "gamma_ratio_quadrature",
]

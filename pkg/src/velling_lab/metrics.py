"""Norms on tangent vectors at the origin and the tangent-map dictionary.

Circle vector fields ``sum c_n e^{in theta} d/dtheta`` are stored by their
``n >= 1`` coefficients (``c_{-n} = conj(c_n)``, ``c_0 = 0``).
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._parallel import thread_count
from .diskquad import DiskGrid, pairwise_sum, spherical_area
from .errors import PerturbationTooLarge
from .schwarzian import QuadDifferential, solve_schwarzian
from .series import TruncatedSeries, ps_eval

DEFAULT_FD_STEP = 1e-2


class MobiusComponentIgnored(UserWarning):
    """``c_1`` was supplied where only the Mob(S^1) quotient is meaningful."""


@dataclass(frozen=True, eq=False)
class FourierVector:
    """``coeffs[n]`` is ``c_n`` for ``n >= 1``; ``coeffs[0]`` is unused and zero."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size < 2:
            c = np.concatenate([c, np.zeros(2 - c.size, dtype=complex)])
        if c[0] != 0:
            raise ValueError("c_0 must be zero for vectors tangent to the S^1 quotient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_coeffs(cls, coeffs: dict[int, complex]) -> "FourierVector":
        n_max = max(coeffs, default=1)
        c = np.zeros(n_max + 1, dtype=complex)
        for n, v in coeffs.items():
            if n < 1:
                raise ValueError("store only n >= 1; negative modes follow by reality")
            c[n] = v
        return cls(c)

    @property
    def max_index(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, theta):
        """Real value of the field coefficient at angle(s) ``theta``."""
        theta = np.asarray(theta, dtype=float)
        n = np.arange(1, self.max_index + 1)
        modes = self.coeffs[1:] * np.exp(1j * np.multiply.outer(theta, n))
        return 2.0 * np.real(modes.sum(axis=-1))


def _weighted_sum(weights, coeffs) -> float:
    return float(pairwise_sum(np.asarray(weights, dtype=float) * np.abs(coeffs) ** 2)) if len(coeffs) else 0.0


def velling_norm_S(Q: QuadDifferential) -> float:
    """``sum n |a_n|^2`` (including an ``a_1`` entry when present)."""
    n = np.arange(1, Q.max_index + 1)
    return _weighted_sum(n, Q.bers[1:])


def vk_norm(v: FourierVector) -> float:
    n = np.arange(1, v.max_index + 1)
    return _weighted_sum(n, v.coeffs[1:])


def metric_family(a: float, b: float, v: FourierVector) -> float:
    """``sum_{n>0} (a n^3 + b n) |c_n|^2``."""
    n = np.arange(1, v.max_index + 1, dtype=float)
    return _weighted_sum(a * n**3 + b * n, v.coeffs[1:])


def wp_norm_series(Q: QuadDifferential) -> float:
    """``(pi/2) sum (n^3 - n) |a_n|^2``."""
    n = np.arange(2, Q.max_index + 1, dtype=float)
    return 0.5 * np.pi * _weighted_sum(n**3 - n, Q.bers[2:])


def wp_norm_integral(Q: TruncatedSeries, grid: DiskGrid) -> float:
    """``1/4 iint |Q|^2 (1 - |z|^2)^2 dxdy``."""
    vals = np.abs(ps_eval(Q, grid.z)) ** 2 * (1.0 - grid.r**2) ** 2
    return 0.25 * float(grid.integrate(vals))


def d0W(v: FourierVector, order: int | None = None) -> TruncatedSeries:
    """``u = i sum_{n>=1} c_n z^(n+1)``."""
    if order is None:
        order = v.max_index + 1
    u = np.zeros(order + 1, dtype=complex)
    m = min(v.max_index, order - 1)
    u[2 : m + 2] = 1j * v.coeffs[1 : m + 1]
    return TruncatedSeries(u)


def d0B(v: FourierVector, order: int | None = None) -> TruncatedSeries:
    """``Q = i sum_{n>=2} (n^3 - n) c_n z^(n-2)``; ``c_1`` is ignored with a warning."""
    if v.max_index >= 1 and v.coeffs[1] != 0:
        warnings.warn("c_1 lies in the Mobius directions and is dropped by d0B", MobiusComponentIgnored, stacklevel=2)
    if order is None:
        order = max(v.max_index - 2, 0)
    n = np.arange(2, v.max_index + 1)
    raw = 1j * (n**3 - n) * v.coeffs[2:]
    return TruncatedSeries.from_poly(raw, order)


def bers_from_fourier(v: FourierVector) -> QuadDifferential:
    """Bers coefficients ``a_n = i c_n`` (``a_1`` kept)."""
    a = np.zeros(max(v.max_index, 2) + 1, dtype=complex)
    a[1 : v.max_index + 1] = 1j * v.coeffs[1:]
    return QuadDifferential(a)


def almost_complex_J(v: FourierVector) -> FourierVector:
    return FourierVector(1j * v.coeffs)


def sobolev_norm(v: FourierVector, s: float) -> float:
    """``sum_{n != 0} |n|^(2s) |c_n|^2`` (twice the one-sided sum)."""
    n = np.arange(1, v.max_index + 1, dtype=float)
    return 2.0 * _weighted_sum(n ** (2 * s), v.coeffs[1:])


@dataclass(frozen=True)
class SecondVariation:
    value: float
    first_difference: float
    raw_second: tuple[float, ...]
    raw_first: tuple[float, ...]
    steps: tuple[float, ...]


def _univalence_margin(f: TruncatedSeries) -> float:
    n = np.arange(2, f.order + 1)
    return float(np.sum(n * np.abs(f.coeffs[2:])))


def _area_samples(family, steps, grid: DiskGrid) -> dict[float, float]:
    ts = sorted({0.0, *steps, *(-h for h in steps)})
    members = [family(t) for t in ts]
    workers = min(thread_count(), len(ts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            areas = list(pool.map(lambda f: spherical_area(f, grid), members))
    else:
        areas = [spherical_area(f, grid) for f in members]
    return dict(zip(ts, areas))


def _differences(areas: dict[float, float], steps) -> SecondVariation:
    a0 = areas[0.0]
    d2 = [(areas[h] - 2 * a0 + areas[-h]) / h**2 for h in steps]
    d1 = [(areas[h] - areas[-h]) / (2 * h) for h in steps]
    if len(steps) == 2:
        ratio = (steps[0] / steps[1]) ** 2
        value = (ratio * d2[1] - d2[0]) / (ratio - 1)
        first = (ratio * d1[1] - d1[0]) / (ratio - 1)
    else:
        value, first = d2[-1], d1[-1]
    return SecondVariation(float(value), float(first), tuple(d2), tuple(d1), tuple(steps))


def second_variation_numeric(
    u: TruncatedSeries, grid: DiskGrid, h: float = DEFAULT_FD_STEP, richardson: bool = True
) -> SecondVariation:
    """``d^2/dt^2 A_S((z + t u)(disk))`` at ``t = 0`` by central differences.

    With ``richardson`` the steps ``h`` and ``h/2`` are combined to cancel the
    ``O(h^2)`` term.  ``first_difference`` is the matching estimate of the
    first derivative, which should vanish.
    """
    if u.coeffs[0] != 0 or (u.order >= 1 and u.coeffs[1] != 0):
        raise ValueError("u must have no constant or linear term")
    z = TruncatedSeries.identity(u.order)
    steps = (h, h / 2) if richardson else (h,)
    if _univalence_margin(z + u * h) > 1.0:
        raise PerturbationTooLarge(f"sum n|b_n| of z + {h} u exceeds 1; reduce the step")
    areas = _area_samples(lambda t: z + u * t, steps, grid)
    return _differences(areas, steps)


def second_variation_family(
    Q: TruncatedSeries, grid: DiskGrid, h: float = DEFAULT_FD_STEP, order: int = 64, richardson: bool = True
) -> SecondVariation:
    """Same functional along the exact family ``S(f^t) = t Q``."""
    steps = (h, h / 2) if richardson else (h,)
    f_h = solve_schwarzian(Q * h, order)
    if _univalence_margin(f_h) > 1.0:
        raise PerturbationTooLarge(f"f^(hQ) fails the coefficient univalence bound at h = {h}")
    areas = _area_samples(lambda t: solve_schwarzian(Q * t, order), steps, grid)
    return _differences(areas, steps)


__all__ = [
    "FourierVector",
    "MobiusComponentIgnored",
    "velling_norm_S",
    "vk_norm",
    "metric_family",
    "wp_norm_series",
    "wp_norm_integral",
    "d0W",
    "d0B",
    "bers_from_fourier",
    "almost_complex_J",
    "sobolev_norm",
    "second_variation_numeric",
    "second_variation_family",
    "SecondVariation",
]

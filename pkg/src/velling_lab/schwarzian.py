"""Solving ``S(f) = Q`` and the tangent dictionary between ``Q``, ``u`` and the
Bers coefficients ``a_n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DenominatorVanishesOnGrid
from .series import DEFAULT_ORDER, TruncatedSeries, antiderivative, exp

POLE_TOL = 1e-8
POLE_RADIUS = 0.99
POLE_GRID = (64, 128)


@dataclass(frozen=True, eq=False)
class QuadDifferential:
    """``Q(z) = sum_{n>=2} (n^3 - n) a_n z^(n-2)`` stored through its Bers coefficients.

    ``bers[n]`` holds ``a_n``; ``bers[0]`` is always zero and ``bers[1]`` is
    the optional ``a_1`` of a tangent vector ``u = sum_{n>=1} a_n z^(n+1)``
    (it contributes nothing to ``Q`` itself).
    """

    bers: np.ndarray

    def __post_init__(self):
        a = np.array(self.bers, dtype=complex).reshape(-1)
        if a.size < 3:
            a = np.concatenate([a, np.zeros(3 - a.size, dtype=complex)])
        if a[0] != 0:
            raise ValueError("Bers coefficient list starts at n = 0, which must be zero")
        a.setflags(write=False)
        object.__setattr__(self, "bers", a)

    @classmethod
    def from_coeffs(cls, coeffs: dict[int, complex] | None = None, **kw) -> "QuadDifferential":
        """Build from ``{n: a_n}``; e.g. ``QuadDifferential.from_coeffs({2: 1})`` is ``Q = 6``."""
        coeffs = dict(coeffs or {})
        n_max = max(coeffs, default=2)
        a = np.zeros(max(n_max, 2) + 1, dtype=complex)
        for n, v in coeffs.items():
            if n < 1:
                raise ValueError(f"Bers index must be >= 1, got {n}")
            a[n] = v
        return cls(a)

    @classmethod
    def from_bers_list(cls, a2_onwards) -> "QuadDifferential":
        """``[a_2, a_3, ...]``."""
        return cls(np.concatenate([[0, 0], np.asarray(a2_onwards, dtype=complex)]))

    @classmethod
    def from_series(cls, Q: TruncatedSeries) -> "QuadDifferential":
        n = np.arange(2, Q.order + 3)
        a = np.zeros(Q.order + 3, dtype=complex)
        a[2:] = Q.coeffs / (n**3 - n)
        return cls(a)

    @property
    def max_index(self) -> int:
        return self.bers.size - 1

    @property
    def a1(self) -> complex:
        return complex(self.bers[1])

    def to_series(self, order: int | None = None) -> TruncatedSeries:
        n = np.arange(2, self.max_index + 1)
        raw = (n**3 - n) * self.bers[2:]
        if order is None:
            order = max(self.max_index - 2, 0)
        return TruncatedSeries.from_poly(raw, order)


def _pole_sample_points(radius: float = POLE_RADIUS, shape=POLE_GRID) -> np.ndarray:
    r = np.linspace(0.0, radius, shape[0])
    t = 2 * np.pi * np.arange(shape[1]) / shape[1]
    return (r[:, None] * np.exp(1j * t)[None, :]).ravel()


def _linear_solution(q: np.ndarray, order: int, y0: complex, y1: complex) -> np.ndarray:
    """Power series of the solution of ``y'' + q y / 2 = 0``."""
    b = np.zeros(order + 1, dtype=complex)
    b[0] = y0
    if order >= 1:
        b[1] = y1
    for k in range(order - 1):
        m = min(k, q.size - 1)
        s = np.dot(q[: m + 1], b[k::-1][: m + 1])
        b[k + 2] = -0.5 * s / ((k + 2) * (k + 1))
    return b


def solve_schwarzian(Q: TruncatedSeries, order: int = DEFAULT_ORDER, check_poles: bool = True) -> TruncatedSeries:
    """Normalized ``f`` (``f(0) = f''(0) = 0``, ``f'(0) = 1``) with ``S(f) = Q``.

    ``f = y1 / y2`` for the two canonical solutions of ``y'' + Q y / 2 = 0``.
    ``Q`` coefficients beyond its order are taken to be zero.  With
    ``check_poles`` the denominator is sampled on ``|z| <= 0.99`` and
    :class:`DenominatorVanishesOnGrid` is raised if it gets below 1e-8.
    """
    q = Q.pad(max(order - 2, 0)).coeffs[: max(order - 1, 1)]
    y1 = _linear_solution(q, order, 0.0, 1.0)
    y2 = _linear_solution(q, order, 1.0, 0.0)
    if check_poles:
        pts = _pole_sample_points()
        vals = TruncatedSeries(y2)(pts)
        worst = int(np.argmin(np.abs(vals)))
        if abs(vals[worst]) < POLE_TOL:
            raise DenominatorVanishesOnGrid(
                f"|y2| = {abs(vals[worst]):.3e} at z = {pts[worst]:.4f}; f has a pole inside the disk"
            )
    f = (TruncatedSeries(y1) / TruncatedSeries(y2)).coeffs.copy()
    f[0] = 0.0
    if order >= 1:
        f[1] = 1.0
    if order >= 2:
        f[2] = 0.0
    return TruncatedSeries(f)


def tangent_u(Q: QuadDifferential, order: int | None = None) -> TruncatedSeries:
    """``u = sum a_n z^(n+1)`` with ``u''' = Q`` and ``u(0) = u'(0) = u''(0) = 0``.

    An ``a_1`` entry (the extended case) lands on ``z^2``.
    """
    if order is None:
        order = Q.max_index + 1
    c = np.zeros(order + 1, dtype=complex)
    m = min(Q.max_index, order - 1)
    c[2 : m + 2] = Q.bers[1 : m + 1]
    return TruncatedSeries(c)


def solve_pretheta(psi: TruncatedSeries) -> TruncatedSeries:
    """``f`` with ``(log f')' = psi``, ``f(0) = 0``, ``f'(0) = 1``; order ``psi.order + 2``."""
    return antiderivative(exp(antiderivative(psi)))


__all__ = ["QuadDifferential", "solve_schwarzian", "tangent_u", "solve_pretheta"]

"""Truncated Taylor series about the origin.

A :class:`TruncatedSeries` of order ``N`` stores the complex coefficients
``c_0 .. c_N`` of ``c_0 + c_1 z + ... + c_N z^N``.  Every operation returns
only coefficients that are fully determined by its inputs, so the order of a
result is the smallest order its operands can support (products and
quotients keep ``min`` of the operand orders, a derivative loses one, an
antiderivative gains one).

The low-level ``_mul``/``_div``/``_compose_poly`` helpers act on the last
axis of an ndarray and broadcast over any leading axes.  The transport code
uses that to push thousands of series through the same arithmetic at once.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from .errors import (
    DivisionByZeroConstantTerm,
    InnerConstantTermNonzero,
    LogOfNonUnitConstantTerm,
    PoleAtOrigin,
    VanishingFirstDerivative,
)

DEFAULT_ORDER = 64
ATOL = 1e-14
RTOL = 1e-12
# |g_0| below this is treated as a zero constant term.
ZERO_THRESHOLD = 1e-300

Number = Union[int, float, complex]


# ---------------------------------------------------------------------------
# array kernels (last axis = coefficient index)
# ---------------------------------------------------------------------------

def _mul(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Cauchy product of ``a`` and ``b`` truncated to degree ``n``."""
    a = a[..., : n + 1]
    b = b[..., : n + 1]
    if a.ndim == 1 and b.ndim == 1:
        return np.convolve(a, b)[: n + 1]
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (n + 1,)
    out = np.zeros(shape, dtype=complex)
    for i in range(min(a.shape[-1], n + 1)):
        m = min(b.shape[-1], n + 1 - i)
        out[..., i : i + m] += a[..., i : i + 1] * b[..., :m]
    return out


def _div(f: np.ndarray, g: np.ndarray, n: int) -> np.ndarray:
    """Quotient ``f / g`` to degree ``n`` by forward substitution."""
    f = np.broadcast_to(f[..., : n + 1], np.broadcast_shapes(f.shape[:-1], g.shape[:-1]) + (n + 1,))
    g0 = g[..., 0]
    if np.any(np.abs(g0) < ZERO_THRESHOLD):
        raise DivisionByZeroConstantTerm("divisor has a vanishing constant term")
    q = np.zeros(f.shape, dtype=complex)
    q[..., 0] = f[..., 0] / g0
    for k in range(1, n + 1):
        m = min(k, g.shape[-1] - 1)
        acc = f[..., k]
        if m > 0:
            acc = acc - np.einsum("...j,...j->...", g[..., 1 : m + 1], q[..., k - 1 :: -1][..., :m])
        q[..., k] = acc / g0
    return q


def _compose_poly(outer: np.ndarray, inner: np.ndarray, n: int) -> np.ndarray:
    """Horner evaluation of the polynomial ``outer`` at the series ``inner``.

    ``inner`` must have a zero constant term; then the result is exact to
    degree ``n`` and only ``outer[:n+1]`` contributes.
    """
    outer = outer[..., : n + 1]
    shape = np.broadcast_shapes(outer.shape[:-1], inner.shape[:-1]) + (n + 1,)
    out = np.zeros(shape, dtype=complex)
    for k in range(outer.shape[-1] - 1, -1, -1):
        if k < outer.shape[-1] - 1:
            out = _mul(out, inner, n)
        out[..., 0] += outer[..., k]
    return out


def _derivative(a: np.ndarray) -> np.ndarray:
    k = np.arange(1, a.shape[-1])
    return a[..., 1:] * k


def _antiderivative(a: np.ndarray) -> np.ndarray:
    out = np.zeros(a.shape[:-1] + (a.shape[-1] + 1,), dtype=complex)
    out[..., 1:] = a / np.arange(1, a.shape[-1] + 1)
    return out


def _exp(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1] - 1
    e = np.zeros(a.shape, dtype=complex)
    e[..., 0] = np.exp(a[..., 0])
    ja = a * np.arange(n + 1)
    for k in range(1, n + 1):
        e[..., k] = np.einsum("...j,...j->...", ja[..., 1 : k + 1], e[..., k - 1 :: -1][..., :k]) / k
    return e


# ---------------------------------------------------------------------------
# public types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Taylor coefficients ``c_0..c_N`` of a germ at the origin."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size == 0:
            raise ValueError("a truncated series needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self):
        return f"TruncatedSeries(order={self.order}, coeffs={np.array2string(self.coeffs[:6], precision=4)}{'...' if self.order > 5 else ''})"

    # constructors ----------------------------------------------------------
    @classmethod
    def zeros(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls(np.zeros(order + 1, dtype=complex))

    @classmethod
    def constant(cls, value: Number, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @classmethod
    def monomial(cls, k: int, order: int = DEFAULT_ORDER, coeff: Number = 1.0) -> "TruncatedSeries":
        c = np.zeros(order + 1, dtype=complex)
        if k <= order:
            c[k] = coeff
        return cls(c)

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls.monomial(1, order)

    @classmethod
    def from_poly(cls, coeffs, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        """Pad (or cut) a coefficient list to ``order``."""
        c = np.zeros(order + 1, dtype=complex)
        src = np.asarray(coeffs, dtype=complex).reshape(-1)[: order + 1]
        c[: src.size] = src
        return cls(c)

    # shape helpers ----------------------------------------------------------
    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError(f"cannot truncate order {self.order} series to {order}")
        return TruncatedSeries(self.coeffs[: order + 1])

    def pad(self, order: int) -> "TruncatedSeries":
        """Extend with zeros, i.e. treat the series as a polynomial."""
        return TruncatedSeries.from_poly(self.coeffs, order)

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        if np.isscalar(other):
            return TruncatedSeries.constant(other, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ps_arith(self, other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ps_arith(self, other, "sub")

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ps_arith(other, self, "sub")

    def __mul__(self, other):
        if np.isscalar(other):
            return TruncatedSeries(self.coeffs * other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return ps_arith(self, other, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return TruncatedSeries(self.coeffs / other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return ps_arith(self, other, "div")

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ps_arith(other, self, "div")

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __call__(self, z):
        return ps_eval(self, z)

    def derivative(self) -> "TruncatedSeries":
        return ps_calculus(self, "derivative")

    def antiderivative(self) -> "TruncatedSeries":
        return ps_calculus(self, "antiderivative")


@dataclass(frozen=True)
class MobiusMap:
    """``z -> (a z + b) / (c z + d)``, scaled on construction so ``ad - bc = 1``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(x) for x in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if det == 0:
            raise ValueError("degenerate Mobius map (ad - bc = 0)")
        s = cmath.sqrt(det)
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v / s)

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def gamma(cls, w: complex) -> "MobiusMap":
        """Disk automorphism ``(z + w) / (1 + conj(w) z)`` sending 0 to ``w``."""
        w = complex(w)
        return cls(1, w, w.conjugate(), 1)

    @classmethod
    def sigma(cls, w: complex) -> "MobiusMap":
        """``(1 - z conj(w)) / (z - w)`` for ``w`` in the exterior disk."""
        w = complex(w)
        return cls(-w.conjugate(), 1, 1, -w)

    @classmethod
    def lam(cls, c: complex) -> "MobiusMap":
        """``z / (c z + 1)``: fixes 0 with unit derivative, shifts f''(0)/2 by -c."""
        return cls(1, 0, c, 1)

    @classmethod
    def rotation(cls, alpha: float) -> "MobiusMap":
        return cls(cmath.exp(0.5j * alpha), 0, 0, cmath.exp(-0.5j * alpha))

    def __call__(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z):
        return 1.0 / (self.c * z + self.d) ** 2

    def pre_schwarzian(self, z):
        """``M''/M'`` evaluated at ``z``."""
        return -2.0 * self.c / (self.c * z + self.d)

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        m = np.array([[self.a, self.b], [self.c, self.d]]) @ np.array([[other.a, other.b], [other.c, other.d]])
        return MobiusMap(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def ps_arith(f: TruncatedSeries, g: TruncatedSeries, kind: Literal["add", "sub", "mul", "div"]) -> TruncatedSeries:
    n = min(f.order, g.order)
    a, b = f.coeffs[: n + 1], g.coeffs[: n + 1]
    if kind == "add":
        return TruncatedSeries(a + b)
    if kind == "sub":
        return TruncatedSeries(a - b)
    if kind == "mul":
        return TruncatedSeries(_mul(a, b, n))
    if kind == "div":
        return TruncatedSeries(_div(a, b, n))
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def ps_compose(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Coefficients of ``f(g(z))``; ``g`` must fix the origin exactly."""
    if g.coeffs[0] != 0:
        raise InnerConstantTermNonzero(
            f"inner series has constant term {g.coeffs[0]!r}; route Mobius maps through mobius_conjugate"
        )
    n = min(f.order, g.order)
    return TruncatedSeries(_compose_poly(f.coeffs, g.coeffs, n))


def ps_calculus(f: TruncatedSeries, kind: Literal["derivative", "antiderivative", "exp", "log"]) -> TruncatedSeries:
    if kind == "derivative":
        if f.order == 0:
            raise ValueError("derivative of an order-0 series carries no information")
        return TruncatedSeries(_derivative(f.coeffs))
    if kind == "antiderivative":
        return TruncatedSeries(_antiderivative(f.coeffs))
    if kind == "exp":
        return TruncatedSeries(_exp(f.coeffs))
    if kind == "log":
        if abs(f.coeffs[0] - 1) > ATOL:
            raise LogOfNonUnitConstantTerm(f"log needs constant term 1, got {f.coeffs[0]!r}")
        if f.order == 0:
            return TruncatedSeries.zeros(0)
        dlog = _div(_derivative(f.coeffs), f.coeffs, f.order - 1)
        return TruncatedSeries(_antiderivative(dlog))
    raise ValueError(f"unknown calculus kind {kind!r}")


def derivative(f: TruncatedSeries) -> TruncatedSeries:
    return ps_calculus(f, "derivative")


def antiderivative(f: TruncatedSeries) -> TruncatedSeries:
    return ps_calculus(f, "antiderivative")


def exp(f: TruncatedSeries) -> TruncatedSeries:
    return ps_calculus(f, "exp")


def log(f: TruncatedSeries) -> TruncatedSeries:
    return ps_calculus(f, "log")


def _check_first_derivative(f: TruncatedSeries, need: int):
    if f.order < need:
        raise ValueError(f"series of order {f.order} is too short (need order >= {need})")
    if abs(f.coeffs[1]) < ZERO_THRESHOLD:
        raise VanishingFirstDerivative("f'(0) = 0")


def pre_schwarzian(f: TruncatedSeries) -> TruncatedSeries:
    """``f''/f'`` to order ``N - 2``."""
    _check_first_derivative(f, 2)
    d1 = _derivative(f.coeffs)
    d2 = _derivative(d1)
    n = f.order - 2
    return TruncatedSeries(_div(d2, d1, n))


def schwarzian(f: TruncatedSeries) -> TruncatedSeries:
    """``f'''/f' - 3/2 (f''/f')^2`` to order ``N - 3``.

    Deliberately computed from the third derivative rather than through
    :func:`pre_schwarzian`, so that the Riccati identity relating the two is a
    genuine cross-check.
    """
    _check_first_derivative(f, 3)
    d1 = _derivative(f.coeffs)
    d2 = _derivative(d1)
    d3 = _derivative(d2)
    n = f.order - 3
    r2 = _div(d2, d1, n)
    r3 = _div(d3, d1, n)
    return TruncatedSeries(r3 - 1.5 * _mul(r2, r2, n))


def mobius_inner_series(M: MobiusMap, order: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    """Series of ``M(z)`` and ``M'(z)^2`` about the origin."""
    if abs(M.d) < ZERO_THRESHOLD:
        raise PoleAtOrigin("Mobius map has a pole at the origin")
    num = np.zeros(order + 1, dtype=complex)
    num[0] = M.b
    if order >= 1:
        num[1] = M.a
    den = np.zeros(order + 1, dtype=complex)
    den[0] = M.d
    if order >= 1:
        den[1] = M.c
    image = _div(num, den, order)
    one = np.zeros(order + 1, dtype=complex)
    one[0] = 1.0
    den2 = _mul(den, den, order)
    dsq = _div(one, _mul(den2, den2, order), order)
    return TruncatedSeries(image), TruncatedSeries(dsq)


def mobius_conjugate(
    f: TruncatedSeries,
    M: MobiusMap,
    mode: Literal["post_compose", "qd_pushforward_inner"] = "post_compose",
):
    """Mobius operations on a series.

    ``post_compose`` returns ``(a f + b) / (c f + d)``.  ``qd_pushforward_inner``
    returns the pair ``(M(z), M'(z)^2)`` expanded about 0 to ``f.order``; ``f``
    only fixes the order in that mode.
    """
    if mode == "post_compose":
        den0 = M.d + M.c * f.coeffs[0]
        if abs(den0) < ZERO_THRESHOLD:
            raise PoleAtOrigin("c f(0) + d = 0: the composed map has a pole at the origin")
        num = M.a * f.coeffs
        num[0] += M.b
        den = M.c * f.coeffs
        den[0] += M.d
        return TruncatedSeries(_div(num, den, f.order))
    if mode == "qd_pushforward_inner":
        if abs(M.d) < ZERO_THRESHOLD or abs(M.b / M.d) >= 1:
            raise PoleAtOrigin("qd_pushforward_inner needs |M(0)| < 1")
        return mobius_inner_series(M, f.order)
    raise ValueError(f"unknown mode {mode!r}")


def ps_eval(f: TruncatedSeries, z):
    """Horner evaluation; ``z`` may be a scalar or an ndarray."""
    c = f.coeffs
    z = np.asarray(z)
    acc = np.full(z.shape, c[-1], dtype=complex)
    for k in range(c.size - 2, -1, -1):
        acc = acc * z + c[k]
    return acc if acc.ndim else complex(acc)


def ps_eval_with_derivative(f: TruncatedSeries, z):
    """Value and first derivative by a single Horner sweep."""
    c = f.coeffs
    z = np.asarray(z)
    val = np.full(z.shape, c[-1], dtype=complex)
    der = np.zeros(z.shape, dtype=complex)
    for k in range(c.size - 2, -1, -1):
        der = der * z + val
        val = val * z + c[k]
    return val, der


def taylor_shift(f: TruncatedSeries, w) -> np.ndarray:
    """Coefficients of ``f(w + s)`` in powers of ``s`` (``f`` read as a polynomial).

    ``w`` may be an array; the result then has shape ``w.shape + (N+1,)``.
    """
    c = f.coeffs[: f.degree + 1]
    w = np.asarray(w, dtype=complex)
    out = np.zeros(w.shape + (c.size,), dtype=complex)
    # synthetic division repeated: each pass peels off one shifted coefficient
    work = np.broadcast_to(c, w.shape + c.shape).copy()
    for k in range(c.size):
        for i in range(c.size - 2, k - 1, -1):
            work[..., i] += w * work[..., i + 1]
        out[..., k] = work[..., k]
    return out


def coeffs_close(f, g, atol: float = ATOL, rtol: float = RTOL, order: int | None = None) -> bool:
    """Mixed-tolerance coefficientwise comparison over the common order."""
    a = f.coeffs if isinstance(f, TruncatedSeries) else np.asarray(f, dtype=complex)
    b = g.coeffs if isinstance(g, TruncatedSeries) else np.asarray(g, dtype=complex)
    n = min(a.size, b.size) if order is None else order + 1
    return bool(np.all(np.abs(a[:n] - b[:n]) <= atol + rtol * np.abs(b[:n])))


def max_coeff_error(f, g, order: int | None = None) -> float:
    a = f.coeffs if isinstance(f, TruncatedSeries) else np.asarray(f, dtype=complex)
    b = g.coeffs if isinstance(g, TruncatedSeries) else np.asarray(g, dtype=complex)
    n = min(a.size, b.size) if order is None else order + 1
    return float(np.max(np.abs(a[:n] - b[:n]))) if n else 0.0


def binomial_series(alpha: float, x: complex, order: int) -> TruncatedSeries:
    """``(1 + x z)^alpha`` to ``order``; a closed-form helper for tests and oracles."""
    c = np.zeros(order + 1, dtype=complex)
    c[0] = 1.0
    for k in range(1, order + 1):
        c[k] = c[k - 1] * (alpha - k + 1) / k * x
    return TruncatedSeries(c)


__all__ = [
    "TruncatedSeries",
    "MobiusMap",
    "ps_arith",
    "ps_compose",
    "ps_calculus",
    "schwarzian",
    "pre_schwarzian",
    "mobius_conjugate",
    "mobius_inner_series",
    "ps_eval",
    "ps_eval_with_derivative",
    "taylor_shift",
    "coeffs_close",
    "max_coeff_error",
    "derivative",
    "antiderivative",
    "exp",
    "log",
    "binomial_series",
]

"""Pre-Schwarzian coordinates.

``theta(f) = f''/f'`` maps normalized univalent functions into the space of
``psi`` with ``sup |psi| (1 - |z|^2) < oo``.  The Riccati map
``Psi(psi) = psi' - psi^2 / 2`` sends ``theta(f)`` to ``S(f)``, and
``Psi_hat(psi) = (Psi(psi), psi(0) / 2)`` is injective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .schwarzian import solve_pretheta, solve_schwarzian
from .series import TruncatedSeries, antiderivative, derivative, pre_schwarzian, ps_eval
from .transport import lambda_post_compose

CONTINUITY_SLOPE = 64.0 / 3.0
# Ahlfors-Weill radius for ||phi||_{oo,2}
AHLFORS_WEILL = 2.0


def continuity_bound(delta: float) -> float:
    """Upper bound ``64 delta / 3 + delta^2 / 2`` for ``||Psi(psi)||_{oo,2}``."""
    return CONTINUITY_SLOPE * delta + 0.5 * delta * delta


# Radius of a ball of psi whose Psi-image stays inside the Ahlfors-Weill ball:
# the root of continuity_bound(delta) = 2.
OPEN_BALL_RADIUS = bisect(lambda d: continuity_bound(d) - AHLFORS_WEILL, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps)


@dataclass(frozen=True)
class WeightedSupNorm:
    """Sampled ``sup |f(z)| (1 - |z|^2)^p`` on a polar lattice of ``|z| <= r_max``.

    The lattice includes the origin and the rim ``|z| = r_max``.  The value
    is a lower bound for the true sup over the disk; truncated series are
    not trusted beyond ``r_max``.
    """

    weight_power: int = 1
    r_max: float = 0.9
    n_radial: int = 128
    n_angular: int = 256

    def __post_init__(self):
        if self.weight_power not in (1, 2):
            raise ValueError("weight_power must be 1 or 2")
        if not 0 < self.r_max < 1:
            raise ValueError("r_max must lie in (0, 1)")

    def points(self) -> np.ndarray:
        r = np.linspace(0.0, self.r_max, self.n_radial)
        t = 2 * np.pi * np.arange(self.n_angular) / self.n_angular
        return (r[:, None] * np.exp(1j * t)[None, :]).ravel()


def weighted_sup_norm(f: TruncatedSeries, norm: WeightedSupNorm) -> float:
    z = norm.points()
    vals = np.abs(ps_eval(f, z)) * (1.0 - np.abs(z) ** 2) ** norm.weight_power
    return float(np.max(vals))


def riccati_Psi(psi: TruncatedSeries) -> TruncatedSeries:
    return derivative(psi) - 0.5 * psi * psi


def psi_hat(psi: TruncatedSeries) -> tuple[TruncatedSeries, complex]:
    return riccati_Psi(psi), complex(0.5 * psi.coeffs[0])


def psi_hat_inverse(phi: TruncatedSeries, c: complex, order: int | None = None) -> TruncatedSeries:
    """The ``psi`` with ``Psi_hat(psi) = (phi, c)``.

    Solve ``S(g) = phi`` with ``g''(0) = 0``, move ``g''(0)/2`` to ``c`` by
    ``z -> z / (1 - c z)``, and return ``theta`` of the result.  The default
    output order is ``phi.order + 1``.
    """
    if order is None:
        order = phi.order + 1
    g = solve_schwarzian(phi, order + 2)
    return pre_schwarzian(lambda_post_compose(g, -c))


def d_psi_hat(psi: TruncatedSeries, phi_dir: TruncatedSeries) -> tuple[TruncatedSeries, complex]:
    """Derivative of ``Psi_hat`` at ``psi`` in direction ``phi_dir``."""
    return derivative(phi_dir) - psi * phi_dir, complex(0.5 * phi_dir.coeffs[0])


def d_psi_hat_inverse(psi: TruncatedSeries, target_phi: TruncatedSeries, target_c: complex) -> TruncatedSeries:
    """``f'(z) (int_0^z target/f' + 2 c)`` with ``f = solve_pretheta(psi)``."""
    fp = derivative(solve_pretheta(psi))
    n = min(fp.order - 1, target_phi.order)
    inner = antiderivative(target_phi.truncate(n) / fp.truncate(n)) + 2.0 * target_c
    return fp.truncate(n + 1) * inner


def continuity_bound_check(psi: TruncatedSeries, sup_grid: WeightedSupNorm | None = None) -> tuple[float, float, bool]:
    """``(||psi||_{oo,1}, ||Psi(psi)||_{oo,2}, bound holds)`` on sampled sup-norms."""
    base = sup_grid or WeightedSupNorm()
    delta = weighted_sup_norm(psi, WeightedSupNorm(1, base.r_max, base.n_radial, base.n_angular))
    image = weighted_sup_norm(riccati_Psi(psi), WeightedSupNorm(2, base.r_max, base.n_radial, base.n_angular))
    return delta, image, bool(image <= continuity_bound(delta))


def distortion_check(f: TruncatedSeries, sup_grid: WeightedSupNorm | None = None, rtol: float = 1e-9) -> bool:
    """Test ``|f''/f' - 2 conj(z) / (1 - |z|^2)| <= 4 / (1 - |z|^2)`` on the lattice."""
    grid = sup_grid or WeightedSupNorm()
    z = grid.points()
    s = 1.0 - np.abs(z) ** 2
    lhs = np.abs(ps_eval(pre_schwarzian(f), z) - 2 * np.conj(z) / s)
    return bool(np.all(lhs <= (4.0 / s) * (1 + rtol)))


__all__ = [
    "WeightedSupNorm",
    "weighted_sup_norm",
    "riccati_Psi",
    "psi_hat",
    "psi_hat_inverse",
    "d_psi_hat",
    "d_psi_hat_inverse",
    "continuity_bound",
    "continuity_bound_check",
    "distortion_check",
    "OPEN_BALL_RADIUS",
]

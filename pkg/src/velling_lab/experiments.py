"""Named experiments behind the command-line runner.

Each experiment takes an :class:`ExperimentConfig` and returns a
:class:`~velling_lab.report.Report` whose ``checks`` hold the declared
tolerances used by ``--assert``.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field, fields
from typing import Callable

import numpy as np

from .diskquad import c_frak, hyperbolic_area, make_disk_grid, regularized_limit, spherical_area
from .errors import ConfigInvalid, ExperimentUnknown
from .metrics import (
    FourierVector,
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
from .prebers import (
    OPEN_BALL_RADIUS,
    WeightedSupNorm,
    continuity_bound,
    continuity_bound_check,
    d_psi_hat,
    d_psi_hat_inverse,
    distortion_check,
    psi_hat,
    psi_hat_inverse,
)
from .report import Check, Report
from .schwarzian import QuadDifferential, solve_schwarzian
from .series import TruncatedSeries, max_coeff_error, pre_schwarzian, schwarzian
from .transport import average_coeff_extrapolated, average_coeff_reference, telescoping_closed_form, telescoping_partial_sum
from .transport import velling_average_extrapolated

MAX_ORDER = 8192
INTEGRANDS = {
    # name: (h(z), limit of the normalized average as r' -> 1)
    "one": (lambda z: np.ones_like(z, dtype=float), 1.0),
    "abs_z2": (lambda z: np.abs(z) ** 2, 1.0),
    "one_minus_r2": (lambda z: 1.0 - np.abs(z) ** 2, 0.0),
}


@dataclass
class GridConfig:
    """Quadrature grid; ``None`` means the experiment's own default."""

    n_radial: int | None = None
    n_angular: int | None = None
    r_max: float | None = None
    boundary_panels: int | None = None


@dataclass
class ExperimentConfig:
    experiment: str = ""
    q_coeffs: list | None = None  # Bers [re, im] pairs for a_2, a_3, ...
    fourier_coeffs: list | None = None  # [re, im] pairs for c_1, c_2, ...
    order: int = 64
    grid: GridConfig = field(default_factory=GridConfig)
    fd_step: float = 1e-2
    j_max: int = 256
    output_path: str | None = None
    n_range: list | None = None
    radii: list | None = None
    samples: int = 20
    seed: int = 0
    integrand: str = "one"
    normalizer: float = 1.0

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigInvalid("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigInvalid(f"unknown config fields: {', '.join(unknown)}")
        data = dict(data)
        grid = data.pop("grid", None) or {}
        if not isinstance(grid, dict):
            raise ConfigInvalid("grid must be an object")
        grid_known = {f.name for f in fields(GridConfig)}
        bad = sorted(set(grid) - grid_known)
        if bad:
            raise ConfigInvalid(f"unknown grid fields: {', '.join(bad)}")
        cfg = cls(grid=GridConfig(**grid), **data)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> None:
        if not isinstance(self.experiment, str):
            raise ConfigInvalid("experiment must be a string")
        _int_in(self.order, "order", 4, MAX_ORDER)
        _real_in(self.fd_step, "fd_step", 0.0, 0.1, low_open=True)
        _int_in(self.j_max, "j_max", 2, 4096)
        _int_in(self.samples, "samples", 0, 100000)
        _int_in(self.seed, "seed", 0, 2**63 - 1)
        _real_in(self.normalizer, "normalizer", -math.inf, math.inf)
        if self.integrand not in INTEGRANDS:
            raise ConfigInvalid(f"integrand must be one of {sorted(INTEGRANDS)}")
        if self.output_path is not None and not isinstance(self.output_path, str):
            raise ConfigInvalid("output_path must be a string")
        for name in ("q_coeffs", "fourier_coeffs"):
            _pairs(getattr(self, name), name)
        if self.n_range is not None:
            if not isinstance(self.n_range, (list, tuple)) or len(self.n_range) != 2:
                raise ConfigInvalid("n_range must be [first, last]")
            lo, hi = self.n_range
            _int_in(lo, "n_range[0]", 1, 10000)
            _int_in(hi, "n_range[1]", lo, 10000)
        if self.radii is not None:
            if not isinstance(self.radii, (list, tuple)) or not self.radii:
                raise ConfigInvalid("radii must be a non-empty list")
            for r in self.radii:
                _real_in(r, "radii entry", 0.0, 1.0, low_open=True, high_open=True)
            if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
                raise ConfigInvalid("radii must be strictly ascending")
        g = self.grid
        if g.n_radial is not None:
            _int_in(g.n_radial, "grid.n_radial", 1, 4096)
        if g.n_angular is not None:
            _int_in(g.n_angular, "grid.n_angular", 1, 65536)
        if g.r_max is not None:
            _real_in(g.r_max, "grid.r_max", 0.0, 1.0, low_open=True)
        if g.boundary_panels is not None:
            _int_in(g.boundary_panels, "grid.boundary_panels", 0, 60)


def _int_in(v, name, lo, hi):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigInvalid(f"{name} must be an integer")
    if not lo <= v <= hi:
        raise ConfigInvalid(f"{name} = {v} outside [{lo}, {hi}]")


def _real_in(v, name, lo, hi, low_open=False, high_open=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigInvalid(f"{name} must be a finite number")
    if v < lo or v > hi or (low_open and v == lo) or (high_open and v == hi):
        raise ConfigInvalid(f"{name} = {v} outside the allowed range")


def _pairs(v, name):
    if v is None:
        return
    if not isinstance(v, (list, tuple)):
        raise ConfigInvalid(f"{name} must be a list of [re, im] pairs")
    for p in v:
        if not isinstance(p, (list, tuple)) or len(p) != 2:
            raise ConfigInvalid(f"{name} entries must be [re, im] pairs")
        for x in p:
            _real_in(x, name, -1e12, 1e12)


def _complex_list(pairs) -> list[complex]:
    return [complex(re, im) for re, im in pairs]


def _quad(cfg: ExperimentConfig, default: dict[int, complex]) -> QuadDifferential:
    if cfg.q_coeffs is None:
        return QuadDifferential.from_coeffs(default)
    return QuadDifferential.from_bers_list(_complex_list(cfg.q_coeffs))


def _fourier(cfg: ExperimentConfig, default: dict[int, complex]) -> FourierVector:
    if cfg.fourier_coeffs is None:
        return FourierVector.from_coeffs(default)
    return FourierVector(np.concatenate([[0], _complex_list(cfg.fourier_coeffs)]))


def _grid(cfg: ExperimentConfig, n_radial=64, n_angular=256, r_max=1.0, boundary_panels=0):
    g = cfg.grid
    return make_disk_grid(
        g.n_radial if g.n_radial is not None else n_radial,
        g.n_angular if g.n_angular is not None else n_angular,
        g.r_max if g.r_max is not None else r_max,
        g.boundary_panels if g.boundary_panels is not None else boundary_panels,
    )


def _grid_info(grid) -> dict:
    return {
        "n_radial": grid.n_radial,
        "n_angular": grid.n_angular,
        "r_max": grid.r_max,
        "boundary_panels": grid.boundary_panels,
        "nodes": grid.size,
    }


def _bers_list(Q: QuadDifferential) -> list[complex]:
    return list(Q.bers[2:])


# experiments


def schwarzian_solve(cfg: ExperimentConfig) -> Report:
    # Q = 6 itself solves to tan(sqrt(3) z) / sqrt(3), which has poles inside the disk
    Q = _quad(cfg, {2: 0.1})
    q = Q.to_series(cfg.order)
    f = solve_schwarzian(q, cfg.order)
    sf = schwarzian(f)
    theta = pre_schwarzian(f)
    riccati = theta.derivative() - 0.5 * theta * theta
    scale = max(1.0, float(np.max(np.abs(q.coeffs))))
    rep = Report("schwarzian-solve")
    rep.inputs = {"bers": _bers_list(Q), "order": cfg.order}
    rep.outputs = {"f_coeffs": list(f.coeffs), "schwarzian_order": sf.order}
    rep.references = {"roundtrip": "S(f) = Q for the normalized solution", "riccati": "S(f) = theta(f)' - theta(f)^2 / 2"}
    rep.checks = {
        "roundtrip": Check(max_coeff_error(sf, q, sf.order) / scale, 0.0, 1e-12, "abs"),
        "riccati": Check(max_coeff_error(riccati, sf) / scale, 0.0, 1e-12, "abs"),
    }
    rep.diagnostics = {"coefficient_scale": scale}
    return rep


def spherical_area_exp(cfg: ExperimentConfig) -> Report:
    Q = _quad(cfg, {})
    f = solve_schwarzian(Q.to_series(cfg.order), cfg.order)
    grid = _grid(cfg)
    area = spherical_area(f, grid)
    identity = not np.any(Q.bers)
    rep = Report("spherical-area")
    rep.inputs = {"bers": _bers_list(Q), "order": cfg.order}
    rep.outputs = {"area": area, "f_coeffs": list(f.coeffs)}
    if identity:
        rep.references = {"area": "A_S(disk) = 2 pi (equality for f = z)"}
        rep.checks = {"area": Check(area, 2 * math.pi, 1e-12)}
    else:
        rep.references = {"area": "A_S(f(disk)) >= 2 pi when f''(0) = 0"}
        rep.checks = {"area_lower_bound": Check(2 * math.pi, area, 1e-12, "bound")}
    rep.diagnostics = {"grid": _grid_info(grid)}
    return rep


def second_variation(cfg: ExperimentConfig) -> Report:
    grid = _grid(cfg)
    rep = Report("second-variation")
    if cfg.fourier_coeffs is not None:
        v = _fourier(cfg, {})
        u = d0W(v, cfg.order)
        sv = second_variation_numeric(u, grid, cfg.fd_step)
        ref = 2 * math.pi * vk_norm(v)
        rep.inputs = {"fourier": list(v.coeffs[1:]), "fd_step": cfg.fd_step, "order": cfg.order}
        rep.references = {"second_variation": "A_S'' = 2 pi sum n |c_n|^2 along z + t u"}
    else:
        Q = _quad(cfg, {2: 1.0})
        sv = second_variation_family(Q.to_series(cfg.order), grid, cfg.fd_step, cfg.order)
        ref = 2 * math.pi * velling_norm_S(Q)
        rep.inputs = {"bers": _bers_list(Q), "fd_step": cfg.fd_step, "order": cfg.order}
        rep.references = {"second_variation": "A_S'' = 2 pi ||Q||_S^2 along S(f^t) = t Q"}
    rep.references["first_variation"] = "A_S' = 0 at the identity"
    rep.outputs = {"second_variation": sv.value, "first_variation": sv.first_difference}
    rep.checks = {
        "second_variation": Check(sv.value, ref, 1e-3),
        "first_variation": Check(sv.first_difference, 0.0, 1e-6, "abs"),
    }
    rep.diagnostics = {
        "grid": _grid_info(grid),
        "steps": list(sv.steps),
        "raw_second": list(sv.raw_second),
        "raw_first": list(sv.raw_first),
    }
    return rep


def vk_norm_exp(cfg: ExperimentConfig) -> Report:
    v = _fourier(cfg, {2: 1.0})
    value = vk_norm(v)
    rep = Report("vk-norm")
    rep.inputs = {"fourier": list(v.coeffs[1:])}
    rep.outputs = {
        "vk_norm": value,
        "metric_family_0_1": metric_family(0.0, 1.0, v),
        "vk_norm_J": vk_norm(almost_complex_J(v)),
        "sobolev_half": sobolev_norm(v, 0.5),
        "wp_from_d0B": wp_norm_series(QuadDifferential.from_series(d0B(_drop_c1(v)))),
        "wp_fourier": 0.5 * math.pi * metric_family(1.0, -1.0, _drop_c1(v)),
    }
    bers = velling_norm_S(bers_from_fourier(v))
    rep.references = {
        "vk_norm": "sum n |c_n|^2 = ||d0W v||_S^2",
        "J_invariance": "||J v|| = ||v||",
        "sobolev_half": "H^(1/2) norm = 2 sum n |c_n|^2",
        "wp": "||d0B v||_WP^2 = (pi/2) sum (n^3 - n) |c_n|^2",
    }
    rep.checks = {
        "vk_norm": Check(value, bers, 1e-14),
        "J_invariance": Check(rep.outputs["vk_norm_J"], value, 1e-14),
        "sobolev_half": Check(rep.outputs["sobolev_half"], 2 * value, 1e-14),
        "wp": Check(rep.outputs["wp_from_d0B"], rep.outputs["wp_fourier"], 1e-12),
    }
    return rep


def _drop_c1(v: FourierVector) -> FourierVector:
    c = np.array(v.coeffs)
    c[1] = 0
    return FourierVector(c)


def wp_compare(cfg: ExperimentConfig) -> Report:
    Q = _quad(cfg, {3: 1.0})
    grid = _grid(cfg)
    series = wp_norm_series(Q)
    integral = wp_norm_integral(Q.to_series(), grid)
    rep = Report("wp-compare")
    rep.inputs = {"bers": _bers_list(Q)}
    rep.outputs = {"series": series, "integral": integral}
    rep.references = {"wp": "1/4 iint |Q|^2 (1 - |z|^2)^2 = (pi/2) sum (n^3 - n) |a_n|^2"}
    rep.checks = {"wp": Check(integral, series, 1e-10)}
    rep.diagnostics = {"grid": _grid_info(grid)}
    return rep


def average_check(cfg: ExperimentConfig) -> Report:
    Q = _quad(cfg, {2: 1.0})
    q = Q.to_series()
    lo, hi = cfg.n_range or (2, 6)
    if lo < 2:
        raise ConfigInvalid("average-check needs n_range starting at j >= 2")
    radii = tuple(cfg.radii or (0.99, 0.999))
    g = cfg.grid
    res = average_coeff_extrapolated(q, list(range(lo, hi + 1)), radii, g.n_radial or 24, g.n_angular)
    rep = Report("average-check")
    rep.inputs = {"bers": _bers_list(Q), "j_range": [lo, hi], "radii": list(radii)}
    rep.references = {"average": "iint |a_j^w|^2 dA_H = 4 pi / (3 (j^3 - j)) sum (n^3 - n) |a_n|^2"}
    for j in range(lo, hi + 1):
        ref = average_coeff_reference(Q, j)
        rep.add_row(j, res[j].value, ref)
        rep.checks[f"j={j}"] = Check(res[j].value, ref, 1e-3)
    rep.outputs = {"averages": {str(j): res[j].value for j in res}}
    rep.diagnostics = {"samples": {str(j): list(res[j].samples) for j in res}}
    return rep


def telescope_check(cfg: ExperimentConfig) -> Report:
    Q = _quad(cfg, {2: 1.0})
    q = Q.to_series()
    radii = tuple(cfg.radii or (0.999, 0.9999))
    g = cfg.grid
    value, runs = velling_average_extrapolated(q, cfg.j_max, radii, g.n_radial or 24, g.n_angular)
    wp_grid = make_disk_grid(64, 256)
    wp = wp_norm_integral(q, wp_grid)
    rep = Report("telescope-check")
    rep.inputs = {"bers": _bers_list(Q), "j_max": cfg.j_max, "radii": list(radii)}
    rep.outputs = {"velling_average": value, "wp_integral": wp, "wp_series": wp_norm_series(Q)}
    rep.references = {
        "velling_average": "1/2 iint ||Q_w||_S^2 dA_H = ||Q||_WP^2",
        "telescoping": "sum_{j=2..J} 1 / (3 (j-1)(j+1)) = 1/4 - (2J + 1) / (6 J (J + 1))",
    }
    J = 2
    while J <= cfg.j_max:
        rep.add_row(J, telescoping_partial_sum(J), telescoping_closed_form(J))
        J *= 2
    rep.checks = {
        "velling_average": Check(value, wp, 1e-2),
        "monotone": Check(float(all(r.monotone for r in runs)), 1.0, 0.0, "abs"),
        "telescoping": Check(telescoping_partial_sum(cfg.j_max), telescoping_closed_form(cfg.j_max), 1e-12),
    }
    rep.diagnostics = {
        "per_radius": [{"r_max": rp, "value": r.value, "last_term": r.last_term, "monotone": r.monotone} for rp, r in zip(radii, runs)],
    }
    return rep


def cfrak_table(cfg: ExperimentConfig) -> Report:
    lo, hi = cfg.n_range or (1, 20)
    rep = Report("cfrak-table")
    rep.inputs = {"n_range": [lo, hi]}
    rep.references = {"cfrak": "c_n = n / 8"}
    worst = 0.0
    for n in range(lo, hi + 1):
        value = c_frak(n)
        rep.add_row(n, value, n / 8)
        worst = max(worst, abs(value - n / 8))
    rep.rows = rep.rows or []
    rep.outputs = {"max_abs_err": worst}
    rep.checks = {"cfrak": Check(worst, 0.0, 1e-10, "abs")}
    return rep


def _random_psi(rng: np.random.Generator, degree: int, delta: float) -> TruncatedSeries:
    c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    # sup |psi| (1 - |z|^2) <= sum |c_k|
    c *= delta * rng.uniform(0.2, 1.0) / np.sum(np.abs(c))
    return TruncatedSeries(c)


def random_small_univalent(rng: np.random.Generator, degree: int, budget: float = 0.5) -> TruncatedSeries:
    """``z + sum_{n>=3} b_n z^n`` with ``sum n |b_n| <= budget``."""
    n = np.arange(3, degree + 1)
    b = rng.standard_normal(n.size) + 1j * rng.standard_normal(n.size)
    b *= budget * rng.uniform(0.1, 1.0) / np.sum(n * np.abs(b))
    c = np.zeros(degree + 1, dtype=complex)
    c[1] = 1.0
    c[3:] = b
    return TruncatedSeries(c)


def appendix_suite(cfg: ExperimentConfig) -> Report:
    rng = np.random.default_rng(cfg.seed)
    sup = WeightedSupNorm()
    worst_hat = worst_dhat = 0.0
    violations = distortion_failures = 0
    margins = []
    for _ in range(cfg.samples):
        psi = _random_psi(rng, 16, 0.1).pad(cfg.order)
        phi, c = psi_hat(psi)
        back = psi_hat_inverse(phi, c)
        worst_hat = max(worst_hat, max_coeff_error(back, psi, phi.order))

        direction = _random_psi(rng, 16, 1.0).pad(cfg.order)
        target_phi, target_c = d_psi_hat(psi, direction)
        recovered = d_psi_hat_inverse(psi, target_phi, target_c)
        again_phi, again_c = d_psi_hat(psi, recovered)
        err = max(max_coeff_error(again_phi, target_phi, again_phi.order - 1), abs(again_c - target_c))
        worst_dhat = max(worst_dhat, err)

        delta, image, ok = continuity_bound_check(psi, sup)
        violations += not ok
        margins.append(continuity_bound(delta) - image)

        f = random_small_univalent(rng, 16)
        distortion_failures += not distortion_check(f, sup)
    rep = Report("appendix-suite")
    rep.inputs = {"samples": cfg.samples, "seed": cfg.seed, "order": cfg.order}
    rep.outputs = {
        "psi_hat_roundtrip": worst_hat,
        "d_psi_hat_roundtrip": worst_dhat,
        "continuity_violations": violations,
        "distortion_failures": distortion_failures,
        "open_ball_radius": OPEN_BALL_RADIUS,
    }
    rep.references = {
        "psi_hat": "Psi_hat is injective with inverse via S(g) = phi",
        "d_psi_hat": "D Psi_hat(phi) = (phi' - psi phi, phi(0)/2), inverse f' (int target / f' + 2 c)",
        "continuity": "||Psi(psi)||_{oo,2} <= 64 delta / 3 + delta^2 / 2",
        "distortion": "|f''/f' - 2 conj(z) / (1 - |z|^2)| <= 4 / (1 - |z|^2)",
    }
    rep.checks = {
        "psi_hat": Check(worst_hat, 0.0, 1e-10, "abs"),
        "d_psi_hat": Check(worst_dhat, 0.0, 1e-10, "abs"),
        "continuity": Check(float(violations), 0.0, 0.0, "abs"),
        "distortion": Check(float(distortion_failures), 0.0, 0.0, "abs"),
    }
    rep.diagnostics = {
        "min_continuity_margin": min(margins) if margins else None,
        "sup_lattice": {"r_max": sup.r_max, "n_radial": sup.n_radial, "n_angular": sup.n_angular},
    }
    return rep


def regularized_limit_exp(cfg: ExperimentConfig) -> Report:
    h, limit = INTEGRANDS[cfg.integrand]
    radii = tuple(cfg.radii or (0.99, 0.999, 0.9999))
    if len(radii) < 2:
        raise ConfigInvalid("regularized-limit needs at least two radii")
    g = cfg.grid
    res = regularized_limit(h, radii, cfg.normalizer, n_radial=g.n_radial or 24, n_angular=g.n_angular or 32)
    ref = cfg.normalizer * limit
    rep = Report("regularized-limit")
    rep.inputs = {"integrand": cfg.integrand, "normalizer": cfg.normalizer, "radii": list(radii)}
    rep.outputs = {"limit": res.value, "ratios": list(res.ratios)}
    rep.references = {"limit": f"normalized hyperbolic average of {cfg.integrand} tends to {limit}"}
    for rp, ratio in zip(radii, res.ratios):
        rep.add_row(rp, ratio, ref)
    rep.checks = {"limit": Check(res.value, ref, 1e-2, "abs")}
    rep.diagnostics = {"hyperbolic_areas": [hyperbolic_area(rp) for rp in radii]}
    return rep


EXPERIMENTS: dict[str, Callable[[ExperimentConfig], Report]] = {
    "schwarzian-solve": schwarzian_solve,
    "spherical-area": spherical_area_exp,
    "second-variation": second_variation,
    "vk-norm": vk_norm_exp,
    "wp-compare": wp_compare,
    "average-check": average_check,
    "telescope-check": telescope_check,
    "cfrak-table": cfrak_table,
    "appendix-suite": appendix_suite,
    "regularized-limit": regularized_limit_exp,
}


def run_experiment(config: ExperimentConfig) -> Report:
    if config.experiment not in EXPERIMENTS:
        raise ExperimentUnknown(f"unknown experiment {config.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    config.validate()
    t0 = time.perf_counter()
    report = EXPERIMENTS[config.experiment](config)
    report.runtime_ms = (time.perf_counter() - t0) * 1e3
    return report


__all__ = ["ExperimentConfig", "GridConfig", "EXPERIMENTS", "run_experiment", "random_small_univalent"]

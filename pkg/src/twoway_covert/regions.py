"""Covert throughput regions for binary-input two-way channels.

Throughputs are normalized by sqrt(n*delta), so the total covertness budget
cancels out of every boundary formula and regions are computed with a unit
budget.  The budget-allocation path optimizer exercises the variational
characterization of the optimal split delta1(lambda) = lambda*delta.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import Distribution, TwoWayChannel, mix
from .metrics import chi_squared, kl_divergence, kl_or_inf

LAMBDA_GRID_DEFAULT = 201
SIMPLEX_RESOLUTION_DEFAULT = 50


@dataclass(frozen=True)
class RegionPoint:
    """One boundary point; ``lam`` is None for converse points, which are
    indexed by their simplex weights instead."""

    lam: float | None
    r1: float
    r2: float
    constants: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.lam is not None and not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda={self.lam} outside [0, 1]")
        if self.r1 < 0 or self.r2 < 0:
            raise ValueError("negative throughput")


@dataclass(frozen=True)
class RhoWeights:
    """Input-pair frequencies of a converse test point; the innocent pair
    (0,0) carries the remaining (asymptotically full) weight and is fixed
    at rho00 = 0 in this normalized parameterization."""

    rho01: float
    rho10: float
    rho11: float

    def __post_init__(self) -> None:
        if min(self.rho01, self.rho10, self.rho11) < 0:
            raise ValueError("negative simplex weight")
        if abs(self.rho01 + self.rho10 + self.rho11 - 1.0) > 1e-12:
            raise ValueError("simplex weights must sum to 1")

    def q_mixture(self, ch: TwoWayChannel) -> Distribution:
        return mix(
            [ch.q(0, 1), ch.q(1, 0), ch.q(1, 1)],
            [self.rho01, self.rho10, self.rho11],
        )


@dataclass(frozen=True)
class BudgetPath:
    """A covertness-budget allocation delta1(lambda) on a lambda grid."""

    lambdas: tuple[float, ...]
    delta1_values: tuple[float, ...]
    delta: float

    def __post_init__(self) -> None:
        if len(self.lambdas) != len(self.delta1_values):
            raise ValueError("grid length mismatch")
        if len(self.lambdas) < 2:
            raise ValueError("need at least 2 grid points")
        if any(b <= a for a, b in zip(self.lambdas, self.lambdas[1:])):
            raise ValueError("lambda grid must be strictly increasing")
        if self.lambdas[0] != 0.0 or self.lambdas[-1] != 1.0:
            raise ValueError("lambda grid must span [0, 1]")
        if abs(self.delta1_values[0]) > 1e-12:
            raise ValueError("delta1(0) must be 0")
        if abs(self.delta1_values[-1] - self.delta) > 1e-12:
            raise ValueError("delta1(1) must equal delta")
        if any(not 0.0 <= d <= self.delta + 1e-12 for d in self.delta1_values):
            raise ValueError("delta1 outside [0, delta]")


def _warn_not_degraded(ch: TwoWayChannel) -> None:
    from .channel import check_assumptions

    report = check_assumptions(ch)
    if not (report.degraded_dir1 and report.degraded_dir2):
        warnings.warn("channel is not degraded in both directions; "
                      "boundary formulas evaluated anyway", stacklevel=3)


def pts_region_point(ch: TwoWayChannel, lam: float,
                     delta1_frac: float) -> RegionPoint:
    """Boundary point of the public-time-sharing region at time share lam
    and budget share delta1_frac = delta1/delta."""
    if not 0.0 <= lam <= 1.0 or not 0.0 <= delta1_frac <= 1.0:
        raise ValueError("lam and delta1_frac must lie in [0, 1]")
    _warn_not_degraded(ch)
    chi1 = chi_squared(ch.q(1, 0), ch.q(0, 0))
    chi2 = chi_squared(ch.q(0, 1), ch.q(0, 0))
    constants = {
        "c1_pts": math.sqrt(2.0 / chi1) if chi1 > 0 else math.inf,
        "c2_pts": math.sqrt(2.0 / chi2) if chi2 > 0 else math.inf,
        "unbounded_dir1": chi1 == 0.0,
        "unbounded_dir2": chi2 == 0.0,
    }
    d1 = kl_divergence(ch.p2(1, 0), ch.p2(0, 0))
    d2 = kl_divergence(ch.p1(0, 1), ch.p1(0, 0))
    r1 = math.sqrt(2.0 * lam * delta1_frac / chi1) * d1 if chi1 > 0 else 0.0
    r2 = (math.sqrt(2.0 * (1.0 - lam) * (1.0 - delta1_frac) / chi2) * d2
          if chi2 > 0 else 0.0)
    return RegionPoint(lam, r1, r2, constants)


def capacity_region_point(ch: TwoWayChannel, lam: float) -> RegionPoint:
    """Boundary point of the covert capacity region at time share lam."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    _warn_not_degraded(ch)
    mixture = mix([ch.q(1, 0), ch.q(0, 1)], [lam, 1.0 - lam])
    chi = chi_squared(mixture, ch.q(0, 0))
    if chi == 0.0:
        return RegionPoint(lam, 0.0, 0.0,
                           {"c_lambda": math.inf, "unbounded": True})
    c_lam = math.sqrt(2.0 / chi)
    r1 = lam * c_lam * kl_divergence(ch.p2(1, 0), ch.p2(0, 0))
    r2 = (1.0 - lam) * c_lam * kl_divergence(ch.p1(0, 1), ch.p1(0, 0))
    return RegionPoint(lam, r1, r2, {"c_lambda": c_lam, "unbounded": False})


def _pareto_maximal(points: list[RegionPoint]) -> list[RegionPoint]:
    """Keep points not weakly dominated (with strict improvement somewhere)
    by any other point; output sorted by decreasing r1."""
    ordered = sorted(points, key=lambda p: (-p.r1, -p.r2))
    out: list[RegionPoint] = []
    best_r2 = -math.inf
    for p in ordered:
        if p.r2 > best_r2:
            out.append(p)
            best_r2 = p.r2
    return out


def converse_frontier(ch: TwoWayChannel,
                      grid_resolution: int = SIMPLEX_RESOLUTION_DEFAULT
                      ) -> list[RegionPoint]:
    """Pareto-maximal outer-bound points over a barycentric grid of
    input-pair frequencies.

    Grid points whose eavesdropper mixture is not absolutely continuous
    w.r.t. the innocent output (e.g. rho11 > 0 on an alarm channel) give an
    infinite covertness cost and are excluded.
    """
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be at least 2")
    p2_00, p1_00 = ch.p2(0, 0), ch.p1(0, 0)
    d2 = {pair: kl_or_inf(ch.p2(*pair), p2_00)
          for pair in ((0, 1), (1, 0), (1, 1))}
    d1 = {pair: kl_or_inf(ch.p1(*pair), p1_00)
          for pair in ((0, 1), (1, 0), (1, 1))}
    points: list[RegionPoint] = []
    g = grid_resolution
    for a in range(g + 1):
        for b in range(g + 1 - a):
            rho = RhoWeights(a / g, b / g, (g - a - b) / g)
            try:
                chi = chi_squared(rho.q_mixture(ch), ch.q(0, 0))
            except Exception:
                continue  # mixture not absolutely continuous: excluded
            if chi == 0.0:
                continue
            tau = math.sqrt(2.0 / chi)
            s1 = (rho.rho01 * d2[(0, 1)] + rho.rho10 * d2[(1, 0)]
                  + rho.rho11 * d2[(1, 1)])
            s2 = (rho.rho01 * d1[(0, 1)] + rho.rho10 * d1[(1, 0)]
                  + rho.rho11 * d1[(1, 1)])
            if math.isinf(s1) or math.isinf(s2):
                continue
            c1 = rho.rho01 + rho.rho11
            if c1 > 0:
                blend = mix([ch.p2(0, 1), ch.p2(1, 1)], [rho.rho01, rho.rho11])
                s1 -= c1 * kl_divergence(blend, p2_00)
            c2 = rho.rho10 + rho.rho11
            if c2 > 0:
                blend = mix([ch.p1(1, 0), ch.p1(1, 1)], [rho.rho10, rho.rho11])
                s2 -= c2 * kl_divergence(blend, p1_00)
            points.append(RegionPoint(
                None, max(0.0, tau * s1), max(0.0, tau * s2),
                {"rho01": rho.rho01, "rho10": rho.rho10,
                 "rho11": rho.rho11, "tau": tau},
            ))
    return _pareto_maximal(points)


# ---------------------------------------------------------------------------
# budget-allocation path


def _path_coordinates(lambdas: np.ndarray, delta1: np.ndarray,
                      delta: float) -> tuple[np.ndarray, np.ndarray]:
    r1 = np.sqrt(lambdas * delta1)
    r2 = np.sqrt((1.0 - lambdas) * (delta - delta1))
    return r1, r2


def _area(lambdas: np.ndarray, delta1: np.ndarray, delta: float) -> float:
    r1, r2 = _path_coordinates(lambdas, delta1, delta)
    dr1 = np.empty_like(r1)
    dr1[1:-1] = (r1[2:] - r1[:-2]) / 2.0
    dr1[0] = (r1[1] - r1[0]) / 2.0
    dr1[-1] = (r1[-1] - r1[-2]) / 2.0
    return float(np.dot(r2, dr1))


def area_of_budget_path(path: BudgetPath) -> float:
    """Signed area swept under the (r1, r2) curve of the path, by trapezoid
    quadrature with central-difference dr1.  Warns if r1 is not monotone."""
    if len(path.lambdas) < 3:
        warnings.warn("degenerate 2-point path; area is a single trapezoid")
    lambdas = np.asarray(path.lambdas)
    delta1 = np.asarray(path.delta1_values)
    r1, _ = _path_coordinates(lambdas, delta1, path.delta)
    if np.any(np.diff(r1) < -1e-12):
        warnings.warn("r1 not monotone along path; returning signed area")
    return _area(lambdas, delta1, path.delta)


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section maximizer of a unimodal f on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def optimize_budget_path(delta: float, grid_size: int,
                         init: BudgetPath | None = None) -> BudgetPath:
    """Maximize the swept area over budget allocations by per-coordinate
    golden-section ascent with pinned boundary values.

    The maximizer of the continuous problem is delta1(lambda) =
    lambda*delta; the returned discrete path lands within about 1e-3*delta
    of it on a 101-point grid.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if grid_size < 11:
        raise ValueError("grid_size must be at least 11")
    lambdas = np.linspace(0.0, 1.0, grid_size)
    if init is not None:
        if len(init.lambdas) != grid_size or init.delta != delta:
            raise ValueError("init path incompatible with delta/grid_size")
        delta1 = np.asarray(init.delta1_values, dtype=float).copy()
    else:
        delta1 = delta * lambdas ** 2
    delta1[0], delta1[-1] = 0.0, delta

    area = _area(lambdas, delta1, delta)
    tol = 1e-7 * delta
    for _ in range(10_000):
        for i in range(1, grid_size - 1):
            def f(v: float, i: int = i) -> float:
                old = delta1[i]
                delta1[i] = v
                val = _area(lambdas, delta1, delta)
                delta1[i] = old
                return val

            # restrict to monotone paths: the signed quadrature rewards
            # sawtooth oscillation, which is not an admissible allocation
            delta1[i] = _golden_max(f, delta1[i - 1], delta1[i + 1], tol)
        new_area = _area(lambdas, delta1, delta)
        if new_area - area < 1e-10:
            break
        area = new_area
    else:
        raise RuntimeError("budget-path optimizer did not converge")
    return BudgetPath(tuple(lambdas.tolist()), tuple(delta1.tolist()), delta)


@dataclass(frozen=True)
class WeightBudget:
    """Maximum average non-innocent symbol fraction under the covertness
    budget; alarm=True when the mixture violates absolute continuity (zero
    budget), unconstrained=True when the chi-squared cost vanishes."""

    mu: float
    alarm: bool
    unconstrained: bool


def weight_budget(ch: TwoWayChannel, rho: RhoWeights, n: int,
                  delta: float) -> WeightBudget:
    """Codeword weight budget mu_n = sqrt(2*delta / (n * chi2(mix, Q00)))."""
    if n < 1 or delta <= 0:
        raise ValueError("need n >= 1 and delta > 0")
    try:
        chi = chi_squared(rho.q_mixture(ch), ch.q(0, 0))
    except Exception:
        return WeightBudget(0.0, alarm=True, unconstrained=False)
    if chi == 0.0:
        return WeightBudget(math.inf, alarm=False, unconstrained=True)
    return WeightBudget(math.sqrt(2.0 * delta / (n * chi)),
                        alarm=False, unconstrained=False)

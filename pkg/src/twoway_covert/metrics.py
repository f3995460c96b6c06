"""Divergence primitives, covert input designs, and finite-blocklength
information quantities.

All logarithms are natural, so every divergence and mutual information is in
nats.  The exact quantities are closed-form sums over the small auxiliary and
channel alphabets; the blocklength n enters only through the design weights,
so arbitrarily large n is cheap.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from .channel import Distribution, TwoWayChannel, mix

TOL_ZERO = 1e-12


class SupportError(ValueError):
    """Absolute-continuity / division-by-zero support violation."""


class AlphabetMismatchError(ValueError):
    """Distributions live on different alphabets."""


class DesignError(ValueError):
    """Covert input design violates its weight constraints."""


def _check_alphabets(p: Distribution, q: Distribution) -> None:
    if len(p) != len(q):
        raise AlphabetMismatchError(f"alphabet sizes {len(p)} != {len(q)}")


def kl_divergence(p: Distribution, q: Distribution) -> float:
    """Relative entropy sum p(x) log(p(x)/q(x)) in nats, with 0 log 0 = 0.

    Each term is accumulated as q*((1+d)log1p(d) - d) with d = (p-q)/q,
    which is non-negative termwise and avoids the first-order cancellation
    that dominates when p is a small perturbation of q.
    """
    _check_alphabets(p, q)
    terms = []
    for pi, qi in zip(p.probs, q.probs):
        if qi <= TOL_ZERO:
            if pi > TOL_ZERO:
                raise SupportError("p is not absolutely continuous w.r.t. q")
            continue
        if pi == 0.0:
            terms.append(qi)
            continue
        d = (pi - qi) / qi
        terms.append(qi * ((1.0 + d) * math.log1p(d) - d))
    return math.fsum(terms)


def kl_or_inf(p: Distribution, q: Distribution) -> float:
    """kl_divergence, with support violations mapped to +inf."""
    try:
        return kl_divergence(p, q)
    except SupportError:
        return math.inf


def chi_squared(p: Distribution, q: Distribution) -> float:
    """Chi-squared distance sum (p(x)-q(x))^2 / q(x)."""
    _check_alphabets(p, q)
    terms = []
    for pi, qi in zip(p.probs, q.probs):
        if qi <= TOL_ZERO:
            if abs(pi - qi) > TOL_ZERO:
                raise SupportError("q vanishes where p differs from q")
            continue
        terms.append((pi - qi) ** 2 / qi)
    return math.fsum(terms)


def total_variation(p: Distribution, q: Distribution) -> float:
    """Total variation distance, in [0, 1]."""
    _check_alphabets(p, q)
    return 0.5 * math.fsum(abs(pi - qi) for pi, qi in zip(p.probs, q.probs))


# ---------------------------------------------------------------------------
# covert input designs

TS = "ts"
STS = "sts"


@dataclass(frozen=True)
class CovertInputDesign:
    """Parameters of a blocklength-dependent covert input distribution.

    The "ts" scheme splits the block between the users via the auxiliary
    variable alone; "sts" additionally thins the auxiliary variable itself,
    spreading the low weight across both factors.
    """

    scheme: str
    p1: float
    p2: float
    n: int
    q: float | None = None      # ts only
    q1: float | None = None     # sts only
    q2: float | None = None     # sts only

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DesignError("blocklength must be a positive integer")
        for name in ("p1", "p2", "q", "q1", "q2"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise DesignError(f"{name}={v} outside [0, 1]")
        if self.scheme == TS:
            if self.q is None:
                raise DesignError("ts design needs q")
            root = self.n ** -0.5
            if self.q * self.p1 * root > 1.0 or (1.0 - self.q) * self.p2 * root > 1.0:
                raise DesignError("ts weight exceeds 1")
        elif self.scheme == STS:
            if self.q1 is None or self.q2 is None:
                raise DesignError("sts design needs q1 and q2")
            root = self.n ** -0.25
            if (self.q1 + self.q2) * root > 1.0:
                raise DesignError(
                    f"auxiliary weight (q1+q2)*n^(-1/4) = "
                    f"{(self.q1 + self.q2) * root} exceeds 1"
                )
            if self.p1 * root > 1.0 or self.p2 * root > 1.0:
                raise DesignError("conditional weight exceeds 1")
        else:
            raise DesignError(f"unknown scheme {self.scheme!r}")

    @classmethod
    def ts(cls, q: float, p1: float, p2: float, n: int) -> "CovertInputDesign":
        return cls(scheme=TS, q=q, p1=p1, p2=p2, n=n)

    @classmethod
    def sts(cls, q1: float, q2: float, p1: float, p2: float, n: int) -> "CovertInputDesign":
        return cls(scheme=STS, q1=q1, q2=q2, p1=p1, p2=p2, n=n)

    def with_n(self, n: int) -> "CovertInputDesign":
        return replace(self, n=n)

    def slot_weights(self) -> tuple[float, float]:
        """The per-user leading weights (q*p1, (1-q)*p2) or (q1*p1, q2*p2)."""
        if self.scheme == TS:
            return self.q * self.p1, (1.0 - self.q) * self.p2
        return self.q1 * self.p1, self.q2 * self.p2


@dataclass(frozen=True)
class JointInputDist:
    """P_U x P_{X1|U} x P_{X2|U} table; only the Bernoulli(1) parameters of
    the conditionals are stored.  At most one user is active per u value, so
    P(X1=1, X2=1) = 0 by construction."""

    u_size: int
    pu: tuple[float, ...]
    px1_given_u: tuple[float, ...]
    px2_given_u: tuple[float, ...]

    def weight(self, u: int, x1: int, x2: int) -> float:
        a = self.px1_given_u[u] if x1 else 1.0 - self.px1_given_u[u]
        b = self.px2_given_u[u] if x2 else 1.0 - self.px2_given_u[u]
        return self.pu[u] * a * b

    def pairs_weight(self) -> dict[tuple[int, int], float]:
        """Marginal P(x1, x2) over the four input pairs."""
        out: dict[tuple[int, int], float] = {}
        for x1 in (0, 1):
            for x2 in (0, 1):
                out[(x1, x2)] = math.fsum(
                    self.weight(u, x1, x2) for u in range(self.u_size)
                )
        return out


def build_design_joint(d: CovertInputDesign) -> JointInputDist:
    """Evaluate the design's joint input table at its blocklength."""
    if d.scheme == TS:
        root = d.n ** -0.5
        return JointInputDist(
            u_size=2,
            pu=(d.q, 1.0 - d.q),
            px1_given_u=(d.p1 * root, 0.0),
            px2_given_u=(0.0, d.p2 * root),
        )
    root = d.n ** -0.25
    return JointInputDist(
        u_size=3,
        pu=(1.0 - (d.q1 + d.q2) * root, d.q1 * root, d.q2 * root),
        px1_given_u=(0.0, d.p1 * root, 0.0),
        px2_given_u=(0.0, 0.0, d.p2 * root),
    )


def eavesdropper_marginal(ch: TwoWayChannel, j: JointInputDist) -> Distribution:
    """Output distribution at the eavesdropper under the joint input table,
    by brute-force summation over (u, x1, x2)."""
    probs = []
    for z in range(ch.z_size):
        probs.append(math.fsum(
            j.weight(u, x1, x2) * ch.q(x1, x2)[z]
            for u in range(j.u_size)
            for x1 in (0, 1)
            for x2 in (0, 1)
        ))
    return Distribution(tuple(probs))


def eavesdropper_marginal_closed_form(ch: TwoWayChannel, d: CovertInputDesign) -> Distribution:
    """Closed form Q00 + n^(-1/2) w (mixture - Q00); the independent route
    against which the brute-force marginal is checked."""
    a, b = d.slot_weights()
    q00 = ch.q(0, 0)
    w = (a + b) * d.n ** -0.5
    if a + b == 0.0:
        return q00
    mixture = mix([ch.q(1, 0), ch.q(0, 1)], [a, b])
    return Distribution(tuple(
        q00[z] + w * (mixture[z] - q00[z]) for z in range(ch.z_size)
    ))


# ---------------------------------------------------------------------------
# information quantities


@dataclass(frozen=True)
class InfoQuantities:
    """The seven single-letter quantities driving reliability/covertness."""

    d_qz_q00: float
    i_x1_y2: float
    i_x2_y1: float
    i_x1x2_z: float
    i_x1u_z: float
    i_x2u_z: float
    i_u_z: float

    FIELDS = ("d_qz_q00", "i_x1_y2", "i_x2_y1", "i_x1x2_z",
              "i_x1u_z", "i_x2u_z", "i_u_z")


def _warn_filled(ch: TwoWayChannel, j: JointInputDist) -> None:
    pairs = {k for k, w in j.pairs_weight().items() if w > TOL_ZERO}
    for table in ("P1", "P2", "Q"):
        for x1, x2 in pairs:
            if ch.is_filled(table, x1, x2):
                warnings.warn(
                    f"design puts weight on defaulted {table} row ({x1},{x2})",
                    stacklevel=3,
                )


def _bernoulli_mix(rows: tuple[Distribution, Distribution], p: float) -> Distribution:
    """(1-p) rows[0] + p rows[1] without renormalization error."""
    return Distribution(tuple(
        (1.0 - p) * rows[0][i] + p * rows[1][i] for i in range(len(rows[0]))
    ))


def exact_finite_n_quantities(ch: TwoWayChannel, d: CovertInputDesign) -> InfoQuantities:
    """Exact single-letter sums over (u, x1, x2) and the output alphabets.

    Every mutual information is decomposed into conditional relative
    entropies so each term is itself a non-negative divergence; no
    asymptotic approximation is involved.
    """
    j = build_design_joint(d)
    _warn_filled(ch, j)
    qz = eavesdropper_marginal(ch, j)
    us = range(j.u_size)

    d_qz_q00 = kl_divergence(qz, ch.q(0, 0))

    # I(X1;Y2|X2,U): average D(P2_{x1 x2} || P_{Y2|x2,u})
    i_x1_y2 = math.fsum(
        j.weight(u, x1, x2) * kl_divergence(
            ch.p2(x1, x2),
            _bernoulli_mix((ch.p2(0, x2), ch.p2(1, x2)), j.px1_given_u[u]),
        )
        for u in us for x1 in (0, 1) for x2 in (0, 1)
        if j.weight(u, x1, x2) > 0.0
    )
    i_x2_y1 = math.fsum(
        j.weight(u, x1, x2) * kl_divergence(
            ch.p1(x1, x2),
            _bernoulli_mix((ch.p1(x1, 0), ch.p1(x1, 1)), j.px2_given_u[u]),
        )
        for u in us for x1 in (0, 1) for x2 in (0, 1)
        if j.weight(u, x1, x2) > 0.0
    )
    i_x1x2_z = math.fsum(
        j.weight(u, x1, x2) * kl_divergence(ch.q(x1, x2), qz)
        for u in us for x1 in (0, 1) for x2 in (0, 1)
        if j.weight(u, x1, x2) > 0.0
    )
    # I(X1,U;Z): average D(P_{Z|x1,u} || Q_Z), marginalizing x2 under u
    i_x1u_z = math.fsum(
        j.weight(u, x1, x2) * kl_divergence(
            _bernoulli_mix((ch.q(x1, 0), ch.q(x1, 1)), j.px2_given_u[u]), qz)
        for u in us for x1 in (0, 1) for x2 in (0, 1)
        if j.weight(u, x1, x2) > 0.0
    )
    i_x2u_z = math.fsum(
        j.weight(u, x1, x2) * kl_divergence(
            _bernoulli_mix((ch.q(0, x2), ch.q(1, x2)), j.px1_given_u[u]), qz)
        for u in us for x1 in (0, 1) for x2 in (0, 1)
        if j.weight(u, x1, x2) > 0.0
    )

    def z_given_u(u: int) -> Distribution:
        return Distribution(tuple(
            math.fsum(
                (j.px1_given_u[u] if x1 else 1.0 - j.px1_given_u[u])
                * (j.px2_given_u[u] if x2 else 1.0 - j.px2_given_u[u])
                * ch.q(x1, x2)[z]
                for x1 in (0, 1) for x2 in (0, 1)
            )
            for z in range(ch.z_size)
        ))

    i_u_z = math.fsum(
        j.pu[u] * kl_divergence(z_given_u(u), qz) for u in us if j.pu[u] > 0.0
    )
    return InfoQuantities(d_qz_q00, i_x1_y2, i_x2_y1, i_x1x2_z,
                          i_x1u_z, i_x2u_z, i_u_z)


def leading_order_quantities(ch: TwoWayChannel, d: CovertInputDesign) -> InfoQuantities:
    """Leading asymptotic term of each quantity.

    The auxiliary-variable leakage i_u_z has no leading coefficient at this
    order (only a remainder exponent), so it is reported as 0; its diagnostic
    is the fitted scaling exponent instead.
    """
    a, b = d.slot_weights()
    root = d.n ** -0.5
    d10_p2 = kl_divergence(ch.p2(1, 0), ch.p2(0, 0))
    d01_p1 = kl_divergence(ch.p1(0, 1), ch.p1(0, 0))
    d10_q = kl_divergence(ch.q(1, 0), ch.q(0, 0))
    d01_q = kl_divergence(ch.q(0, 1), ch.q(0, 0))
    if a + b > 0.0:
        mixture = mix([ch.q(1, 0), ch.q(0, 1)], [a, b])
        d_qz = (1.0 / d.n) * (a + b) ** 2 / 2.0 * chi_squared(mixture, ch.q(0, 0))
    else:
        d_qz = 0.0
    return InfoQuantities(
        d_qz_q00=d_qz,
        i_x1_y2=a * root * d10_p2,
        i_x2_y1=b * root * d01_p1,
        i_x1x2_z=root * (a * d10_q + b * d01_q),
        i_x1u_z=a * root * d10_q,
        i_x2u_z=b * root * d01_q,
        i_u_z=0.0,
    )


def fit_scaling_exponent(
    ch: TwoWayChannel,
    family: CovertInputDesign,
    quantity: str,
    n_grid: list[int],
    mode: str = "exact",
) -> tuple[float, float]:
    """Least-squares slope of log(quantity) against log(n).

    mode="exact" fits the exact quantity; mode="difference" fits the gap
    |exact - leading| to expose the remainder order.  Returns (slope, r2);
    r2 below 0.99 triggers a warning.
    """
    if quantity not in InfoQuantities.FIELDS:
        raise ValueError(f"unknown quantity {quantity!r}")
    if len(n_grid) < 4:
        raise ValueError("n_grid needs at least 4 points")
    if max(n_grid) < 1000 * min(n_grid):
        raise ValueError("n_grid must span at least 3 decades")
    xs, ys = [], []
    for n in n_grid:
        exact = getattr(exact_finite_n_quantities(ch, family.with_n(n)), quantity)
        if mode == "difference":
            value = abs(exact - getattr(
                leading_order_quantities(ch, family.with_n(n)), quantity))
        elif mode == "exact":
            value = exact
        else:
            raise ValueError(f"unknown mode {mode!r}")
        if value <= 0.0:
            warnings.warn(f"{quantity} vanishes at n={n}; point excluded")
            continue
        xs.append(math.log(n))
        ys.append(math.log(value))
    if len(xs) < 4:
        raise ValueError("fewer than 4 usable grid points after exclusions")
    import numpy as np

    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = slope * np.array(xs) + intercept
    ss_res = float(np.sum((np.array(ys) - fitted) ** 2))
    ss_tot = float(np.sum((np.array(ys) - np.mean(ys)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    if r2 < 0.99:
        warnings.warn(f"poor log-log fit for {quantity}: r2={r2:.4f}")
    return float(slope), r2


def bernstein_tail_bound(variance_sum: float, c: float, t: float) -> float:
    """Sub-exponential tail bound exp(-(t^2/2)/(variance_sum + c*t/3))."""
    if variance_sum < 0 or c <= 0 or t < 0:
        raise ValueError("need variance_sum >= 0, c > 0, t >= 0")
    if t == 0.0:
        return 1.0
    return math.exp(-(t * t / 2.0) / (variance_sum + c * t / 3.0))

"""Random-codebook generation, threshold decoding, Monte Carlo error
estimation, and exact induced-distribution / resolvability diagnostics.

Randomness uses the counter-based Philox generator so results are
deterministic in the seed and trials can be replayed or parallelized:
codebook generation uses key=seed, and trial t uses key=(seed XOR t),
masked to 64 bits.

The channel is simulated through its marginals only: the outputs y1, y2, z
are drawn independently given the inputs.  Every quantity in scope depends
on one output alphabet at a time, so correlations between outputs never
enter.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .channel import Distribution, TwoWayChannel
from .metrics import (CovertInputDesign, InfoQuantities, build_design_joint,
                      eavesdropper_marginal, exact_finite_n_quantities,
                      kl_divergence)

ENUM_CAP_ENV = "COVERT_ENUM_CAP"
ENUM_CAP_DEFAULT = 4 ** 10
MEMORY_CAP_ENV = "COVERT_MEMORY_CAP"
MEMORY_CAP_DEFAULT = 10 ** 8

SEED_MASK = 0xFFFFFFFFFFFFFFFF
WILSON_Z = 1.959963984540054  # two-sided 95%

#: u-word symbols: 0 idle, 1 user-1 slot, 2 user-2 slot
U_IDLE, U_ONE, U_TWO = 0, 1, 2


def _enum_cap() -> int:
    return int(os.environ.get(ENUM_CAP_ENV, ENUM_CAP_DEFAULT))


def _memory_cap() -> int:
    return int(os.environ.get(MEMORY_CAP_ENV, MEMORY_CAP_DEFAULT))


@dataclass(frozen=True)
class CodebookSizes:
    """Message-set sizes: common m0, per-user public (m1p, m2p) and secret
    (m1s, m2s) parts."""

    m0: int
    m1p: int
    m1s: int
    m2p: int
    m2s: int

    def __post_init__(self) -> None:
        if min(self.m0, self.m1p, self.m1s, self.m2p, self.m2s) < 1:
            raise ValueError("all codebook sizes must be >= 1")

    def check_chaining(self) -> None:
        """Chained blocks recycle both secret messages as the next block's
        common message, so their product must cover it."""
        if self.m1s * self.m2s < self.m0:
            raise ValueError(
                f"chaining needs m1s*m2s >= m0, got "
                f"{self.m1s}*{self.m2s} < {self.m0}"
            )


@dataclass(frozen=True)
class Codebook:
    """Realized random codewords.

    u_words has shape (m0, n) over {0,1,2}; x1_words has shape
    (m0, m1p, m1s, n) and is nonzero only where the indexing u word is 1;
    x2_words has shape (m0, m2p, m2s, n), nonzero only where u is 2.
    """

    u_words: np.ndarray
    x1_words: np.ndarray
    x2_words: np.ndarray
    design: CovertInputDesign
    sizes: CodebookSizes
    seed: int

    @property
    def n(self) -> int:
        return self.u_words.shape[1]

    def __post_init__(self) -> None:
        u = self.u_words
        if np.any(self.x1_words & (u[:, None, None, :] != U_ONE)):
            raise ValueError("x1 word active outside user-1 slots")
        if np.any(self.x2_words & (u[:, None, None, :] != U_TWO)):
            raise ValueError("x2 word active outside user-2 slots")


def _slot_probs(d: CovertInputDesign) -> tuple[np.ndarray, float, float]:
    """(P_U over labels (idle, 1, 2), active prob for x1, for x2)."""
    if d.scheme == "ts":
        root = d.n ** -0.5
        return np.array([0.0, d.q, 1.0 - d.q]), d.p1 * root, d.p2 * root
    root = d.n ** -0.25
    return (np.array([1.0 - (d.q1 + d.q2) * root, d.q1 * root, d.q2 * root]),
            d.p1 * root, d.p2 * root)


def generate_codebook(ch: TwoWayChannel, d: CovertInputDesign,
                      sizes: CodebookSizes, seed: int) -> Codebook:
    """Sample a codebook deterministically from the seed."""
    n = d.n
    cells = n * (sizes.m0
                 + sizes.m0 * sizes.m1p * sizes.m1s
                 + sizes.m0 * sizes.m2p * sizes.m2s)
    if cells > _memory_cap():
        raise MemoryError(
            f"codebook needs {cells} entries, cap is {_memory_cap()}"
        )
    rng = np.random.Generator(np.random.Philox(key=seed & SEED_MASK))
    pu, a1, a2 = _slot_probs(d)
    u_words = rng.choice(3, size=(sizes.m0, n), p=pu).astype(np.int8)
    x1 = (rng.random((sizes.m0, sizes.m1p, sizes.m1s, n)) < a1)
    x2 = (rng.random((sizes.m0, sizes.m2p, sizes.m2s, n)) < a2)
    x1 &= (u_words == U_ONE)[:, None, None, :]
    x2 &= (u_words == U_TWO)[:, None, None, :]
    return Codebook(u_words, x1.astype(np.int8), x2.astype(np.int8),
                    d, sizes, seed)


# ---------------------------------------------------------------------------
# threshold decoding


def _log_table(rows: tuple[Distribution, ...], size: int) -> np.ndarray:
    """log kernel table indexed [x1][x2][y], zeros mapped to -inf."""
    t = np.array([[rows[2 * a + b].probs for b in (0, 1)] for a in (0, 1)])
    with np.errstate(divide="ignore"):
        return np.log(t)


def _log_marginal_user1(ch: TwoWayChannel, d: CovertInputDesign,
                        x2: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Per-position log P_{Y2|X2,U}(y|x2_t, u_t), shape (n, y2_size)."""
    _, a1, _ = _slot_probs(d)
    p2 = np.array([[ch.p2(a, b).probs for b in (0, 1)] for a in (0, 1)])
    active = (u == U_ONE)
    p = np.where(active, a1, 0.0)
    marg = (1.0 - p)[:, None] * p2[0, x2] + p[:, None] * p2[1, x2]
    with np.errstate(divide="ignore"):
        return np.log(marg)


def _log_marginal_user2(ch: TwoWayChannel, d: CovertInputDesign,
                        x1: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Per-position log P_{Y1|X1,U}(y|x1_t, u_t), shape (n, y1_size)."""
    _, _, a2 = _slot_probs(d)
    p1 = np.array([[ch.p1(a, b).probs for b in (0, 1)] for a in (0, 1)])
    active = (u == U_TWO)
    p = np.where(active, a2, 0.0)
    marg = (1.0 - p)[:, None] * p1[x1, 0] + p[:, None] * p1[x1, 1]
    with np.errstate(divide="ignore"):
        return np.log(marg)


def decoding_score(ch: TwoWayChannel, d: CovertInputDesign,
                   x1_candidate, x2_known, u_known, y2_observed) -> float:
    """Accumulated log-likelihood ratio used by user 2 to test a user-1
    codeword candidate: sum_t log W(y2_t|x1_t,x2_t) / P_{Y2|X2,U}(y2_t).

    A position where the denominator vanishes but the numerator does not
    yields +inf (flagged with a warning); a vanishing numerator yields -inf.
    """
    x1 = np.asarray(x1_candidate, dtype=np.intp)
    x2 = np.asarray(x2_known, dtype=np.intp)
    u = np.asarray(u_known, dtype=np.intp)
    y2 = np.asarray(y2_observed, dtype=np.intp)
    if not (len(x1) == len(x2) == len(u) == len(y2)):
        raise ValueError("sequence length mismatch")
    log_w = _log_table(ch.p2_rows, ch.y2_size)
    num = log_w[x1, x2, y2]
    den = _log_marginal_user1(ch, d, x2, u)[np.arange(len(y2)), y2]
    return _score_from_logs(num, den)


def decoding_score_user2(ch: TwoWayChannel, d: CovertInputDesign,
                         x2_candidate, x1_known, u_known,
                         y1_observed) -> float:
    """Mirror of decoding_score for user 1 testing a user-2 codeword."""
    x2 = np.asarray(x2_candidate, dtype=np.intp)
    x1 = np.asarray(x1_known, dtype=np.intp)
    u = np.asarray(u_known, dtype=np.intp)
    y1 = np.asarray(y1_observed, dtype=np.intp)
    if not (len(x1) == len(x2) == len(u) == len(y1)):
        raise ValueError("sequence length mismatch")
    log_w = _log_table(ch.p1_rows, ch.y1_size)
    num = log_w[x1, x2, y1]
    den = _log_marginal_user2(ch, d, x1, u)[np.arange(len(y1)), y1]
    return _score_from_logs(num, den)


def _score_from_logs(num: np.ndarray, den: np.ndarray) -> float:
    num_inf = np.isneginf(num)
    den_inf = np.isneginf(den)
    if np.any(den_inf & ~num_inf):
        warnings.warn("zero-probability observation under the decoding "
                      "denominator; score is +inf")
        return math.inf
    if np.any(num_inf):
        return -math.inf
    return float(np.sum(num - den))


# ---------------------------------------------------------------------------
# Monte Carlo error estimation


@dataclass(frozen=True)
class SimReport:
    """Outcome of a Monte Carlo decoding run."""

    trials: int
    errors1: int
    errors2: int
    errors: int
    pe_hat: float
    ci_low: float
    ci_high: float
    gamma1: float
    gamma2: float
    mu_slack: float
    seed: int

    def to_text(self) -> str:
        lines = []
        for name in ("trials", "errors1", "errors2", "errors"):
            lines.append(f"{name}={getattr(self, name)}")
        for name in ("pe_hat", "ci_low", "ci_high",
                     "gamma1", "gamma2", "mu_slack"):
            lines.append(f"{name}={getattr(self, name):.9g}")
        lines.append(f"seed={self.seed}")
        return "\n".join(lines) + "\n"


def wilson_interval(k: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score 95% confidence interval for a binomial proportion."""
    if n < 1:
        raise ValueError("need at least one trial")
    center = (k + z * z / 2.0) / (n + z * z)
    hw = z * math.sqrt(k * (n - k) / n + z * z / 4.0) / (n + z * z)
    return max(0.0, center - hw), min(1.0, center + hw)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(seed ^ trial) & SEED_MASK))


def _sample_output(rng: np.random.Generator, rows: np.ndarray,
                   x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """One output symbol per position from the kernel rows (2,2,size)."""
    cdf = np.cumsum(rows[x1, x2], axis=1)
    r = rng.random(len(x1))
    return (r[:, None] > cdf).sum(axis=1)


def _threshold_decode(scores: np.ndarray, true_flat: int,
                      gamma: float) -> bool:
    """True iff unique-threshold decoding fails: the true message scores
    below the threshold, or any competitor scores at or above it."""
    passing = np.flatnonzero(scores >= gamma)
    return not (len(passing) == 1 and passing[0] == true_flat)


def estimate_error_probability(ch: TwoWayChannel, codebook: Codebook,
                               mu_slack: float, trials: int, seed: int,
                               gamma1: float | None = None,
                               gamma2: float | None = None) -> SimReport:
    """Monte Carlo estimate of the decoding error probability.

    Default thresholds are gamma_i = (1-mu)*n*I(.;.|.) from the exact
    finite-blocklength quantities; both decoders know the common message.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 0.0 < mu_slack < 1.0:
        raise ValueError("mu_slack must lie in (0, 1)")
    d = codebook.design
    n = codebook.n
    q = exact_finite_n_quantities(ch, d)
    if gamma1 is None:
        gamma1 = (1.0 - mu_slack) * n * q.i_x1_y2
    if gamma2 is None:
        gamma2 = (1.0 - mu_slack) * n * q.i_x2_y1

    log_p2 = _log_table(ch.p2_rows, ch.y2_size)
    log_p1 = _log_table(ch.p1_rows, ch.y1_size)
    p1_rows = np.array([[ch.p1(a, b).probs for b in (0, 1)] for a in (0, 1)])
    p2_rows = np.array([[ch.p2(a, b).probs for b in (0, 1)] for a in (0, 1)])
    s = codebook.sizes

    errors1 = errors2 = errors = 0
    for t in range(trials):
        rng = _trial_rng(seed, t)
        w0 = int(rng.integers(s.m0))
        w1p, w1s = int(rng.integers(s.m1p)), int(rng.integers(s.m1s))
        w2p, w2s = int(rng.integers(s.m2p)), int(rng.integers(s.m2s))
        u = codebook.u_words[w0].astype(np.intp)
        x1 = codebook.x1_words[w0, w1p, w1s].astype(np.intp)
        x2 = codebook.x2_words[w0, w2p, w2s].astype(np.intp)
        y1 = _sample_output(rng, p1_rows, x1, x2)
        y2 = _sample_output(rng, p2_rows, x1, x2)

        # user 2 decodes (w1p, w1s) against every candidate at w0
        cands1 = codebook.x1_words[w0].reshape(-1, n).astype(np.intp)
        with np.errstate(invalid="ignore"):
            num = log_p2[cands1, x2[None, :], y2[None, :]]
            den = _log_marginal_user1(ch, d, x2, u)[np.arange(n), y2]
            scores1 = np.where(
                np.isneginf(num).any(axis=1), -np.inf,
                np.nansum(num - den[None, :], axis=1),
            )
        e1 = _threshold_decode(scores1, w1p * s.m1s + w1s, gamma1)

        cands2 = codebook.x2_words[w0].reshape(-1, n).astype(np.intp)
        with np.errstate(invalid="ignore"):
            num = log_p1[x1[None, :], cands2, y1[None, :]]
            den = _log_marginal_user2(ch, d, x1, u)[np.arange(n), y1]
            scores2 = np.where(
                np.isneginf(num).any(axis=1), -np.inf,
                np.nansum(num - den[None, :], axis=1),
            )
        e2 = _threshold_decode(scores2, w2p * s.m2s + w2s, gamma2)

        errors1 += e1
        errors2 += e2
        errors += e1 or e2

    pe_hat = errors / trials
    lo, hi = wilson_interval(errors, trials)
    return SimReport(trials, errors1, errors2, errors, pe_hat, lo, hi,
                     gamma1, gamma2, mu_slack, seed)


# ---------------------------------------------------------------------------
# exact induced distributions and resolvability diagnostics


def _product_distribution(rows: list[np.ndarray]) -> np.ndarray:
    out = np.array([1.0])
    for r in rows:
        out = np.kron(out, r)
    return out


def exact_induced_distribution(ch: TwoWayChannel,
                               codebook: Codebook) -> np.ndarray:
    """Eavesdropper output distribution over all z^n sequences, averaged
    over uniform messages; exact, as a flat array of length z_size**n
    (symbol at position 0 is the most significant digit)."""
    n = codebook.n
    if ch.z_size ** n > _enum_cap():
        raise MemoryError(
            f"z_size**n = {ch.z_size ** n} exceeds enumeration cap "
            f"{_enum_cap()} (set {ENUM_CAP_ENV} to raise it)"
        )
    q_rows = np.array([[ch.q(a, b).probs for b in (0, 1)] for a in (0, 1)])
    s = codebook.sizes
    total = s.m0 * s.m1p * s.m1s * s.m2p * s.m2s
    acc = np.zeros(ch.z_size ** n)
    for w0 in range(s.m0):
        for i1 in range(s.m1p * s.m1s):
            x1 = codebook.x1_words[w0].reshape(-1, n)[i1]
            for i2 in range(s.m2p * s.m2s):
                x2 = codebook.x2_words[w0].reshape(-1, n)[i2]
                acc += _product_distribution(
                    [q_rows[x1[t], x2[t]] for t in range(n)]
                )
    return acc / total


def _kl_arrays(p: np.ndarray, q: np.ndarray) -> float:
    """kl_divergence on flat arrays (same stable formula, vectorized)."""
    mask_q = q > 1e-12
    if np.any(p[~mask_q] > 1e-12):
        raise ValueError("support violation in sequence-level divergence")
    p, q = p[mask_q], q[mask_q]
    d = (p - q) / q
    terms = np.where(p == 0.0, q, q * ((1.0 + d) * np.log1p(np.where(d <= -1, 0, d)) - d))
    return float(np.sum(terms))


@dataclass(frozen=True)
class ResolvabilityReport:
    """Sequence-level covertness diagnostics of one realized codebook."""

    d_hat_vs_qz: float
    d_hat_vs_q00: float
    gap: float
    nu_min: float
    four_term_bound: float


def resolvability_report(ch: TwoWayChannel, d: CovertInputDesign,
                         codebook: Codebook,
                         mu_slack: float) -> ResolvabilityReport:
    """Compare the realized codebook's induced eavesdropper distribution to
    the memoryless targets, plus the ensemble four-term bound.

    The four-term bound pairs each information quantity with the message
    sets whose indices remain unresolved in the corresponding collision
    event: I(X1,X2;Z)/(m1p*m2p*m0), I(X1,U;Z)/(m1p*m0),
    I(X2,U;Z)/(m2p*m0), I(U;Z)/m0.
    """
    n = codebook.n
    q_hat = exact_induced_distribution(ch, codebook)
    j = build_design_joint(d)
    qz = np.array(eavesdropper_marginal(ch, j).probs)
    q00 = np.array(ch.q(0, 0).probs)
    qz_n = _product_distribution([qz] * n)
    q00_n = _product_distribution([q00] * n)
    d_hat_vs_qz = _kl_arrays(q_hat, qz_n)
    d_hat_vs_q00 = _kl_arrays(q_hat, q00_n)
    single = exact_finite_n_quantities(ch, d)
    gap = abs(d_hat_vs_q00 - n * single.d_qz_q00)
    nu_min = min(p for p in ch.q(0, 0).probs if p > 1e-12)
    s = codebook.sizes
    m = 1.0 + mu_slack
    bound = (
        math.exp(m * n * single.i_x1x2_z) / (s.m1p * s.m2p * s.m0)
        + math.exp(m * n * single.i_x1u_z) / (s.m1p * s.m0)
        + math.exp(m * n * single.i_x2u_z) / (s.m2p * s.m0)
        + math.exp(m * n * single.i_u_z) / s.m0
    )
    return ResolvabilityReport(d_hat_vs_qz, d_hat_vs_q00, gap, nu_min, bound)


def rate_thresholds(ch: TwoWayChannel, d: CovertInputDesign,
                    mu_slack: float) -> dict[str, float]:
    """Reliability upper bounds on the per-user message sizes and
    resolvability lower bounds on the public/common message products,
    all in nats."""
    a, b = d.slot_weights()
    root_n = math.sqrt(d.n)
    q = exact_finite_n_quantities(ch, d)
    up = 1.0 - mu_slack
    lo = 1.0 + mu_slack
    return {
        "log_m1_max": up * a * root_n * kl_divergence(ch.p2(1, 0), ch.p2(0, 0)),
        "log_m2_max": up * b * root_n * kl_divergence(ch.p1(0, 1), ch.p1(0, 0)),
        "log_m1p_m2p_m0_min": lo * d.n * q.i_x1x2_z,
        "log_m1p_m0_min": lo * d.n * q.i_x1u_z,
        "log_m2p_m0_min": lo * d.n * q.i_x2u_z,
        "log_m0_min": lo * d.n * q.i_u_z,
    }


def _binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability outside [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log(1.0 - p)


def chaining_bound(per_block: list[dict]) -> float:
    """Secrecy/covertness cost of chaining blocks that recycle each block's
    secret messages as the next block's common message.

    Each entry needs keys divergence, pe, m1s, m2s; the bound is
    2*sum(divergence) plus the two Fano terms per block.
    """
    total = 0.0
    for blk in per_block:
        div, pe = blk["divergence"], blk["pe"]
        if div < 0 or not 0.0 <= pe <= 1.0:
            raise ValueError("need divergence >= 0 and pe in [0, 1]")
        total += 2.0 * div
        total += _binary_entropy(pe) + pe * math.log(blk["m1s"])
        total += _binary_entropy(pe) + pe * math.log(blk["m2s"])
    return total

"""Binary-input two-way channel kernels: parsing, validation and classification.

A channel is described by the three marginal kernel tables seen by user 1,
user 2 and the eavesdropper, each indexed by the input pair (x1, x2) in
{0,1}^2.  Input symbol 0 is the innocent "no transmission" symbol, so the
row at (0,0) is the eavesdropper's baseline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

TOL_STOCHASTIC = 1e-9
TOL_ZERO = 1e-12
TOL_HULL = 1e-9

INPUT_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))

#: kernel table key -> user tag recorded in ``filled_rows``
USER_TAGS = {"P1": "user1", "P2": "user2", "Q": "eve"}


class ChannelSpecError(ValueError):
    """Malformed or inconsistent channel specification."""


@dataclass(frozen=True)
class Distribution:
    """Probability vector over a finite alphabet."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.probs) < 1:
            raise ChannelSpecError("empty alphabet")
        if any((not math.isfinite(p)) or p < 0 for p in self.probs):
            raise ChannelSpecError(f"negative or non-finite entry in {self.probs}")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > TOL_STOCHASTIC:
            raise ChannelSpecError(f"non-stochastic row (sums to {total!r})")

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, i: int) -> float:
        return self.probs[i]

    def support(self) -> set[int]:
        return {i for i, p in enumerate(self.probs) if p > TOL_ZERO}


def mix(components: list[Distribution], weights: list[float]) -> Distribution:
    """Convex combination of distributions on a common alphabet."""
    size = len(components[0])
    if any(len(c) != size for c in components):
        raise ChannelSpecError("alphabet mismatch in mixture")
    total = math.fsum(weights)
    return Distribution(tuple(
        math.fsum(w * c[i] for c, w in zip(components, weights)) / total
        for i in range(size)
    ))


def absolutely_continuous(p: Distribution, q: Distribution) -> bool:
    """True iff p(x) > 0 implies q(x) > 0 (zero tested at 1e-12)."""
    return all(q[i] > TOL_ZERO for i in range(len(p)) if p[i] > TOL_ZERO)


@dataclass(frozen=True)
class TwoWayChannel:
    """Marginal kernels of a binary-input two-way channel.

    Each ``*_rows`` tuple holds four rows in the fixed input-pair order
    (0,0), (0,1), (1,0), (1,1).  ``filled_rows`` records the rows that were
    defaulted to the corresponding innocent row rather than specified.
    """

    p1_rows: tuple[Distribution, Distribution, Distribution, Distribution]
    p2_rows: tuple[Distribution, Distribution, Distribution, Distribution]
    q_rows: tuple[Distribution, Distribution, Distribution, Distribution]
    y1_size: int
    y2_size: int
    z_size: int
    filled_rows: frozenset[tuple[str, int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        for rows, size, name in (
            (self.p1_rows, self.y1_size, "P1"),
            (self.p2_rows, self.y2_size, "P2"),
            (self.q_rows, self.z_size, "Q"),
        ):
            if len(rows) != 4:
                raise ChannelSpecError(f"{name} needs one row per input pair")
            for row in rows:
                if len(row) != size:
                    raise ChannelSpecError(
                        f"inconsistent alphabet size in {name}: "
                        f"row has {len(row)} entries, declared {size}"
                    )

    def p1(self, x1: int, x2: int) -> Distribution:
        return self.p1_rows[2 * x1 + x2]

    def p2(self, x1: int, x2: int) -> Distribution:
        return self.p2_rows[2 * x1 + x2]

    def q(self, x1: int, x2: int) -> Distribution:
        return self.q_rows[2 * x1 + x2]

    def row(self, table: str, x1: int, x2: int) -> Distribution:
        return {"P1": self.p1, "P2": self.p2, "Q": self.q}[table](x1, x2)

    def is_filled(self, table: str, x1: int, x2: int) -> bool:
        return (USER_TAGS[table], x1, x2) in self.filled_rows


@dataclass(frozen=True)
class ChannelReport:
    """Structural classification of a channel (alarm / degradation / hull)."""

    alarm_symbols: frozenset[int]
    is_alarm: bool
    abs_continuity_ok: bool
    q00_in_hull_pair: bool
    q00_in_hull_triple: bool
    degraded_dir1: bool
    degraded_dir2: bool
    divergence_table: dict[str, float]


# ---------------------------------------------------------------------------
# parsing / rendering


def _parse_table(doc: dict, key: str, size: int) -> tuple[dict, set]:
    """Read one kernel table, defaulting missing rows to the innocent row."""
    raw = doc.get(key, {})
    if not isinstance(raw, dict):
        raise ChannelSpecError(f"{key} must map 'x1,x2' keys to probability arrays")
    rows: dict[tuple[int, int], Distribution] = {}
    for k, v in raw.items():
        try:
            x1s, x2s = k.split(",")
            x1, x2 = int(x1s), int(x2s)
        except ValueError as exc:
            raise ChannelSpecError(f"bad row key {k!r} in {key}") from exc
        if (x1, x2) not in INPUT_PAIRS:
            raise ChannelSpecError(f"row key {k!r} outside binary input pairs")
        rows[(x1, x2)] = Distribution(tuple(float(p) for p in v))
    if (0, 0) not in rows:
        raise ChannelSpecError(f"{key} is missing the innocent row '0,0'")
    filled = set()
    for pair in INPUT_PAIRS:
        if pair not in rows:
            rows[pair] = rows[(0, 0)]
            filled.add((USER_TAGS[key], pair[0], pair[1]))
    for pair in INPUT_PAIRS:
        if len(rows[pair]) != size:
            raise ChannelSpecError(
                f"inconsistent alphabet size in {key} row {pair}"
            )
    return rows, filled


def _marginalize_joint(doc: dict) -> TwoWayChannel:
    joint = doc["joint"]
    y1, y2, z = int(doc["y1"]), int(doc["y2"]), int(doc["z"])
    p1_rows, p2_rows, q_rows = [], [], []
    for x1, x2 in INPUT_PAIRS:
        block = joint[x1][x2]
        p1 = [0.0] * y1
        p2 = [0.0] * y2
        qz = [0.0] * z
        for a in range(y1):
            for b in range(y2):
                for c in range(z):
                    w = float(block[a][b][c])
                    if w < 0 or not math.isfinite(w):
                        raise ChannelSpecError("negative or non-finite joint entry")
                    p1[a] += w
                    p2[b] += w
                    qz[c] += w
        p1_rows.append(Distribution(tuple(p1)))
        p2_rows.append(Distribution(tuple(p2)))
        q_rows.append(Distribution(tuple(qz)))
    return TwoWayChannel(tuple(p1_rows), tuple(p2_rows), tuple(q_rows), y1, y2, z)


def parse_channel(spec_text: str) -> TwoWayChannel:
    """Parse a channel-spec document (JSON, schema in the repo README)."""
    try:
        doc = json.loads(spec_text)
    except json.JSONDecodeError as exc:
        raise ChannelSpecError(f"malformed document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ChannelSpecError("top level must be an object")
    for key in ("y1", "y2", "z"):
        if key not in doc or int(doc[key]) < 1:
            raise ChannelSpecError(f"missing or invalid alphabet size {key!r}")
    if "joint" in doc:
        if any(k in doc for k in ("P1", "P2", "Q")):
            raise ChannelSpecError("'joint' is mutually exclusive with P1/P2/Q")
        return _marginalize_joint(doc)
    y1, y2, z = int(doc["y1"]), int(doc["y2"]), int(doc["z"])
    p1, f1 = _parse_table(doc, "P1", y1)
    p2, f2 = _parse_table(doc, "P2", y2)
    q, f3 = _parse_table(doc, "Q", z)
    return TwoWayChannel(
        tuple(p1[pair] for pair in INPUT_PAIRS),
        tuple(p2[pair] for pair in INPUT_PAIRS),
        tuple(q[pair] for pair in INPUT_PAIRS),
        y1, y2, z,
        frozenset(f1 | f2 | f3),
    )


def render_channel(ch: TwoWayChannel) -> str:
    """Inverse of parse_channel; defaulted rows are omitted so the
    round trip reproduces ``filled_rows`` exactly."""
    doc: dict = {"y1": ch.y1_size, "y2": ch.y2_size, "z": ch.z_size}
    for key in ("P1", "P2", "Q"):
        table = {}
        for x1, x2 in INPUT_PAIRS:
            if not ch.is_filled(key, x1, x2):
                table[f"{x1},{x2}"] = list(ch.row(key, x1, x2).probs)
        doc[key] = table
    return json.dumps(doc, indent=2)


# ---------------------------------------------------------------------------
# classification


def detect_alarm_symbols(ch: TwoWayChannel) -> frozenset[int]:
    """Symbols at the eavesdropper that fire only on simultaneous 1-inputs."""
    q00, q01, q10, q11 = (ch.q(*pair) for pair in INPUT_PAIRS)
    return frozenset(
        i for i in range(ch.z_size)
        if q11[i] > TOL_ZERO
        and q00[i] <= TOL_ZERO and q01[i] <= TOL_ZERO and q10[i] <= TOL_ZERO
    )


def _in_hull_pair(target: Distribution, a: Distribution, b: Distribution) -> bool:
    """Exact 1-D test for target = t*a + (1-t)*b with t in [0,1]."""
    t_lo, t_hi = 0.0, 1.0
    t_known = None
    for i in range(len(target)):
        da = a[i] - b[i]
        rhs = target[i] - b[i]
        if abs(da) <= TOL_HULL:
            if abs(rhs) > TOL_HULL:
                return False
            continue
        t = rhs / da
        if t_known is None:
            t_known = t
        elif abs(t - t_known) > TOL_HULL:
            return False
    if t_known is None:
        return True  # all coordinates degenerate: target == a == b
    return t_lo - TOL_HULL <= t_known <= t_hi + TOL_HULL


def _in_hull_triple(target: Distribution, verts: list[Distribution]) -> bool:
    """Membership of target in conv{v0,v1,v2} by vertex/edge enumeration
    plus a least-squares interior solve."""
    import numpy as np

    for v in verts:
        if max(abs(v[i] - target[i]) for i in range(len(target))) <= TOL_HULL:
            return True
    for i in range(3):
        for j in range(i + 1, 3):
            if _in_hull_pair(target, verts[i], verts[j]):
                return True
    # interior: solve a*(v0-v2) + b*(v1-v2) = target - v2, c = 1-a-b
    m = np.array([
        [verts[0][k] - verts[2][k], verts[1][k] - verts[2][k]]
        for k in range(len(target))
    ])
    rhs = np.array([target[k] - verts[2][k] for k in range(len(target))])
    sol, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    a, b = float(sol[0]), float(sol[1])
    if a < -TOL_HULL or b < -TOL_HULL or a + b > 1.0 + TOL_HULL:
        return False
    residual = m @ sol - rhs
    return float(max(abs(residual))) <= TOL_HULL


def check_assumptions(ch: TwoWayChannel) -> ChannelReport:
    """Classify a channel: alarm symbols, absolute continuity, whether the
    innocent eavesdropper row lies in the hull of the active rows, and the
    per-direction degradation comparison."""
    from .metrics import kl_or_inf

    q00, q01, q10, q11 = (ch.q(*pair) for pair in INPUT_PAIRS)
    alarm = detect_alarm_symbols(ch)
    abs_cont = all(
        absolutely_continuous(ch.q(x1, x2), q00)
        for x1, x2 in INPUT_PAIRS if (x1, x2) != (1, 1)
    )
    table = {
        "d_p2_10_vs_00": kl_or_inf(ch.p2(1, 0), ch.p2(0, 0)),
        "d_q_10_vs_00": kl_or_inf(q10, q00),
        "d_p1_01_vs_00": kl_or_inf(ch.p1(0, 1), ch.p1(0, 0)),
        "d_q_01_vs_00": kl_or_inf(q01, q00),
    }
    return ChannelReport(
        alarm_symbols=alarm,
        is_alarm=bool(alarm),
        abs_continuity_ok=abs_cont,
        q00_in_hull_pair=_in_hull_pair(q00, q01, q10),
        q00_in_hull_triple=_in_hull_triple(q00, [q01, q10, q11]),
        degraded_dir1=table["d_p2_10_vs_00"] > table["d_q_10_vs_00"],
        degraded_dir2=table["d_p1_01_vs_00"] > table["d_q_01_vs_00"],
        divergence_table=table,
    )

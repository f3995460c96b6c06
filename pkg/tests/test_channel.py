import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoway_covert import (ChannelSpecError, Distribution, TwoWayChannel,
                           check_assumptions, detect_alarm_symbols,
                           parse_channel, render_channel)
from twoway_covert.channel import INPUT_PAIRS, mix


def test_distribution_validates():
    Distribution((0.5, 0.5))
    with pytest.raises(ChannelSpecError, match="non-stochastic row"):
        Distribution((0.5, 0.4))
    with pytest.raises(ChannelSpecError):
        Distribution((1.5, -0.5))
    with pytest.raises(ChannelSpecError):
        Distribution(())


def test_parse_example_rows_and_filled(example_channel):
    ch = example_channel
    assert ch.p1(0, 0).probs == (0.15, 0.25, 0.6)
    assert ch.p1(0, 1).probs == (0.45, 0.3, 0.25)
    assert ch.p2(1, 0).probs == (0.25, 0.2, 0.55)
    assert ch.q(0, 0).probs == (0.2, 0.3, 0.3, 0.2)
    assert ch.q(0, 1).probs == (0.35, 0.2, 0.2, 0.25)
    assert ch.q(1, 0).probs == (0.2, 0.1, 0.4, 0.3)
    # unspecified rows default to the innocent row and are recorded
    assert ch.p1(1, 0) == ch.p1(0, 0)
    assert ch.q(1, 1) == ch.q(0, 0)
    assert ch.filled_rows == frozenset({
        ("user1", 1, 0), ("user1", 1, 1),
        ("user2", 0, 1), ("user2", 1, 1),
        ("eve", 1, 1),
    })


def test_parse_rejects_bad_rows():
    doc = {"y1": 2, "y2": 2, "z": 2,
           "P1": {"0,0": [0.5, 0.4]},
           "P2": {"0,0": [0.5, 0.5]},
           "Q": {"0,0": [0.5, 0.5]}}
    with pytest.raises(ChannelSpecError, match="non-stochastic row"):
        parse_channel(json.dumps(doc))
    with pytest.raises(ChannelSpecError):
        parse_channel("not json {")
    doc["P1"]["0,0"] = [0.5, 0.5, 0.0]
    with pytest.raises(ChannelSpecError):
        parse_channel(json.dumps(doc))


def test_parse_all_uniform_no_filled():
    row = [0.25, 0.25, 0.25, 0.25]
    doc = {"y1": 4, "y2": 4, "z": 4}
    for key in ("P1", "P2", "Q"):
        doc[key] = {f"{a},{b}": row for a, b in INPUT_PAIRS}
    ch = parse_channel(json.dumps(doc))
    assert ch.filled_rows == frozenset()
    assert all(ch.row(k, a, b).probs == tuple(row)
               for k in ("P1", "P2", "Q") for a, b in INPUT_PAIRS)


def test_parse_joint_marginalizes():
    # joint = product of per-output factors, so marginals are recoverable
    p1 = [0.3, 0.7]
    p2 = [0.6, 0.4]
    q = [0.1, 0.9]
    block = [[[p1[a] * p2[b] * q[c] for c in range(2)]
              for b in range(2)] for a in range(2)]
    doc = {"y1": 2, "y2": 2, "z": 2,
           "joint": [[block, block], [block, block]]}
    ch = parse_channel(json.dumps(doc))
    assert ch.p1(0, 0).probs == pytest.approx(tuple(p1), abs=1e-12)
    assert ch.p2(1, 1).probs == pytest.approx(tuple(p2), abs=1e-12)
    assert ch.q(0, 1).probs == pytest.approx(tuple(q), abs=1e-12)
    with pytest.raises(ChannelSpecError):
        parse_channel(json.dumps({**doc, "Q": {"0,0": q}}))


def test_round_trip_example(example_channel, alarm_channel):
    for ch in (example_channel, alarm_channel):
        assert parse_channel(render_channel(ch)) == ch


@st.composite
def channels(draw):
    def dist(size):
        raw = draw(st.lists(st.floats(0.01, 1.0), min_size=size,
                            max_size=size))
        total = math.fsum(raw)
        probs = [x / total for x in raw]
        probs[-1] = 1.0 - math.fsum(probs[:-1])
        return Distribution(tuple(probs))

    y1 = draw(st.integers(2, 4))
    y2 = draw(st.integers(2, 4))
    z = draw(st.integers(2, 4))
    return TwoWayChannel(
        tuple(dist(y1) for _ in range(4)),
        tuple(dist(y2) for _ in range(4)),
        tuple(dist(z) for _ in range(4)),
        y1, y2, z,
    )


@settings(max_examples=50, deadline=None)
@given(channels())
def test_round_trip_random(ch):
    assert parse_channel(render_channel(ch)) == ch


def test_detect_alarm_constructed():
    rows3 = Distribution((0.5, 0.3, 0.2, 0.0))
    alarm = Distribution((0.0, 0.0, 0.0, 1.0))
    other = Distribution((0.25,) * 4)
    ch = TwoWayChannel((other,) * 4, (other,) * 4,
                       (rows3, rows3, rows3, alarm), 4, 4, 4)
    assert detect_alarm_symbols(ch) == frozenset({3})
    ch_pos = TwoWayChannel((other,) * 4, (other,) * 4, (other,) * 4, 4, 4, 4)
    assert detect_alarm_symbols(ch_pos) == frozenset()


def test_detect_alarm_example(example_channel, alarm_channel):
    assert detect_alarm_symbols(example_channel) == frozenset()
    assert detect_alarm_symbols(alarm_channel) == frozenset({4})


def _kl_oracle(p, q):
    return math.fsum(pi * math.log(pi / qi)
                     for pi, qi in zip(p, q) if pi > 0)


def test_check_assumptions_example(example_channel):
    rep = check_assumptions(example_channel)
    t = rep.divergence_table
    assert t["d_p2_10_vs_00"] == pytest.approx(
        _kl_oracle((0.25, 0.2, 0.55), (0.4, 0.35, 0.25)), abs=1e-12)
    assert t["d_p2_10_vs_00"] == pytest.approx(0.20423, abs=1e-5)
    assert t["d_q_10_vs_00"] == pytest.approx(0.12685, abs=1e-5)
    assert t["d_p1_01_vs_00"] == pytest.approx(0.33021, abs=1e-5)
    assert t["d_q_01_vs_00"] == pytest.approx(0.08947, abs=1e-5)
    assert rep.degraded_dir1 and rep.degraded_dir2
    assert not rep.q00_in_hull_pair
    assert not rep.is_alarm
    assert rep.abs_continuity_ok


def test_hull_pair_degenerate():
    u = Distribution((0.25,) * 4)
    ch = TwoWayChannel((u,) * 4, (u,) * 4, (u,) * 4, 4, 4, 4)
    assert check_assumptions(ch).q00_in_hull_pair
    assert check_assumptions(ch).q00_in_hull_triple


def test_hull_pair_true_interior():
    q01 = Distribution((0.1, 0.9))
    q10 = Distribution((0.9, 0.1))
    q00 = Distribution((0.5, 0.5))
    other = Distribution((0.5, 0.5))
    ch = TwoWayChannel((other,) * 4, (other,) * 4,
                       (q00, q01, q10, q00), 2, 2, 2)
    assert check_assumptions(ch).q00_in_hull_pair


def test_degraded_false_when_equal_rows(example_channel):
    doc = json.loads(render_channel(example_channel))
    doc["P2"]["1,0"] = doc["P2"]["0,0"]
    rep = check_assumptions(parse_channel(json.dumps(doc)))
    assert not rep.degraded_dir1
    assert rep.degraded_dir2


def test_permutation_covariance(alarm_channel):
    perm = [4, 0, 3, 1, 2]  # new position of each old z symbol
    doc = json.loads(render_channel(alarm_channel))
    for key, row in doc["Q"].items():
        new = [0.0] * 5
        for old, p in enumerate(row):
            new[perm[old]] = p
        doc["Q"][key] = new
    permuted = parse_channel(json.dumps(doc))
    a = check_assumptions(alarm_channel)
    b = check_assumptions(permuted)
    assert b.alarm_symbols == frozenset(perm[i] for i in a.alarm_symbols)
    for name in ("is_alarm", "abs_continuity_ok", "q00_in_hull_pair",
                 "q00_in_hull_triple", "degraded_dir1", "degraded_dir2"):
        assert getattr(a, name) == getattr(b, name)
    for key in a.divergence_table:
        assert a.divergence_table[key] == pytest.approx(
            b.divergence_table[key], abs=1e-12)


def test_mix_is_convex_combination():
    a = Distribution((1.0, 0.0))
    b = Distribution((0.0, 1.0))
    assert mix([a, b], [0.25, 0.75]).probs == (0.25, 0.75)

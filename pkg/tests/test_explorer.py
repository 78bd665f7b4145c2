import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from napa.core import Framework, State, Triple
from napa.dsl import serialize
from napa.explorer import (
    FailedAt,
    Inconclusive,
    NotFound,
    QueryError,
    Trace,
    TraceStep,
    Verified,
    check_reachable,
    check_state_invariants,
    explore,
    framework_hash,
    parse_query,
    parse_trace,
    replay,
    serialize_trace,
    state_id,
)

from gen import random_framework
from scenario import A_1, A_D, N1, P1, P2

DOLLARS = ("a4", "a9", "a15")
CONSOLES = ("a5", "a11", "a16")


def test_full_exploration(fw):
    g = explore(fw, check=True)
    assert not g.truncated
    assert State(A_1, N1) in g
    assert g.states[0] == g.initial
    assert len(g.states) == 7 and len(g.edges) == 9
    for e in g.edges:
        assert e.source in g.state_set() and e.target in g.state_set()


def test_every_reachable_state_conserves_goods(fw):
    for s in explore(fw).states:
        assert sum(s.quantities[a] for a in DOLLARS) == 1250
        assert sum(s.quantities[a] for a in CONSOLES) == 2
        check_state_invariants(fw, s)


def test_no_persuasions_single_state():
    fw = Framework.build(["a"], scope={"e": ["a"]}, initial_visible="a")
    g = explore(fw)
    assert len(g) == 1 and g.edges == [] and not g.truncated


def test_truncation(fw):
    g = explore(fw, max_states=1)
    assert g.truncated and len(g) == 1
    with pytest.raises(ValueError):
        explore(fw, max_states=0)


def test_exploration_is_deterministic(fw):
    g1, g2 = explore(fw), explore(fw)
    assert g1.states == g2.states
    assert [e.sort_key() for e in g1.edges] == [e.sort_key() for e in g2.edges]


def test_parallel_expansion_is_confluent(fw):
    seq = explore(fw)
    par = explore(fw, workers=4)
    assert seq.states == par.states and seq.edge_set() == par.edge_set()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_parallel_matches_sequential_on_random_frameworks(seed):
    fw = random_framework(random.Random(seed))
    seq = explore(fw, 300)
    par = explore(fw, 300, workers=3)
    assert seq.states == par.states
    assert seq.edge_set() == par.edge_set()
    assert seq.truncated == par.truncated


def test_state_ids_are_stable():
    s = State({"a", "b"}, {"x": 1})
    assert state_id(s) == state_id(State(["b", "a"], {"x": 1}))
    assert len(state_id(s)) == 12


# -- queries -----------------------------------------------------------------------


def test_query_parsing(fw):
    q = parse_query("visible(a3) && !visible(a2) && qty(a9) >= 300", fw)
    assert [a.kind for a in q.atoms] == ["visible", "not-visible", "qty"]
    assert str(parse_query("not-visible(a2)")) == "not-visible(a2)"
    for bad in ("visible(a99)", "qty(a7) == 1", "qty(a9) = 1", "visible a3", ""):
        with pytest.raises(QueryError):
            parse_query(bad, fw)


def test_first_sale_is_witnessed_in_one_step(fw):
    t = check_reachable(fw, "qty(a11) == 1 && qty(a9) == 350")
    assert isinstance(t, Trace) and len(t) == 1
    assert t.steps[0].lam == P1 and t.steps[0].union_set == A_D


def test_overpayment_is_unreachable(fw):
    assert isinstance(check_reachable(fw, "qty(a9) > 650"), NotFound)


def test_inconclusive_when_truncated(fw):
    assert isinstance(check_reachable(fw, "qty(a9) > 650", max_states=2), Inconclusive)


def test_initial_state_can_witness(fw):
    t = check_reachable(fw, "visible(a1)")
    assert isinstance(t, Trace) and len(t) == 0


# -- traces and replay -----------------------------------------------------------


def test_trace_round_trip(fw):
    t = check_reachable(fw, "qty(a11) == 1 && qty(a9) == 350")
    text = serialize_trace(fw, t)
    lines = text.splitlines()
    assert lines[0] == framework_hash(fw) and lines[0].startswith("sha256:")
    assert lines[1].startswith("{a1,a2,a4,a5,a6,a8,a9,a10,a12,a13,a15,a16} | (a10,a16,a11) (a13,a9,a15) | ")
    header, steps = parse_trace(text)
    assert header == framework_hash(fw)
    assert steps == [(t.steps[0].union_set, t.steps[0].lam, t.steps[0].state)]
    assert replay(fw, text) == Verified(1)
    assert replay(fw, t) == Verified(1)


def test_framework_hash_tracks_content(fw, fw_haggle):
    assert framework_hash(fw) != framework_hash(fw_haggle)
    assert framework_hash(fw).startswith("sha256:") and len(framework_hash(fw)) == 71


def test_replay_rejects_resource_unsafe_step(fw, s0):
    bogus = Trace(s0, (TraceStep(A_D, P1 | P2, State(A_1, N1)),))
    got = replay(fw, serialize_trace(fw, bogus))
    assert isinstance(got, FailedAt)
    assert (got.step, got.reason, got.element) == (1, "resource-safety", "a16")


def test_replay_detects_tampered_state(fw):
    t = check_reachable(fw, "qty(a11) == 1 && qty(a9) == 350")
    text = serialize_trace(fw, t).replace("a9=350", "a9=351")
    got = replay(fw, text)
    assert isinstance(got, FailedAt) and (got.step, got.reason) == (1, "state")


def test_replay_detects_wrong_framework(fw, fw_haggle):
    t = check_reachable(fw, "qty(a11) == 1")
    got = replay(fw_haggle, serialize_trace(fw, t))
    assert isinstance(got, FailedAt) and got.reason == "hash"


def test_replay_detects_bad_union_set(fw, s0):
    bogus = Trace(s0, (TraceStep(frozenset({"a1"}), P1, State(A_1, N1)),))
    got = replay(fw, serialize_trace(fw, bogus))
    assert (got.step, got.reason) == (1, "union-set")


def test_replay_reports_format_errors(fw):
    for text in ("", framework_hash(fw) + "\n{a1} | x | {a1}\n", framework_hash(fw) + "\n{a1} | (a,b,c) | {} | a9=x\n"):
        got = replay(fw, text)
        assert isinstance(got, FailedAt) and got.reason == "format"


def test_replay_accepts_crlf_and_comments(fw):
    t = check_reachable(fw, "qty(a11) == 1")
    text = "# recorded by hand\n" + serialize_trace(fw, t)
    assert replay(fw, text.replace("\n", "\r\n")) == Verified(1)


def test_walks_replay(fw):
    # every path in the fixture graph replays
    g = explore(fw)
    for s in g.states:
        assert replay(fw, serialize_trace(fw, g.path_to(s))) == Verified(len(g.path_to(s)))


def test_hash_is_hash_of_serialized_text(fw):
    import hashlib

    assert framework_hash(fw) == "sha256:" + hashlib.sha256(serialize(fw).encode()).hexdigest()


def test_haggling_variant_reaches_a3(fw_haggle):
    # induce a7, then convert a2 into a3 at the reduced price
    t = check_reachable(fw_haggle, "visible(a3)")
    assert isinstance(t, Trace), t
    assert [step.lam for step in t.steps][-2:] == [
        frozenset({Triple("a8", None, "a7")}),
        frozenset({Triple("a7", "a2", "a3")}),
    ]


def test_haggling_variant_conversion_is_blocked_by_a12(fw_haggle):
    # what the engine actually does: e1's unattacked a12 attacks a7 once a7
    # is visible, so (a7,a2,a3) drops out of the intersection over agents
    from napa.dynamics import adjusted_attacks, lambda_base, successors

    s2 = State(A_1 | {"a7"}, N1)
    assert adjusted_attacks(fw_haggle, s2) == {("a12", "a7")}
    (ax,) = successors(fw_haggle, s2).union_sets
    assert "a12" in ax
    assert Triple("a7", "a2", "a3") not in lambda_base(fw_haggle, s2, ax)
    assert [e.target for e in successors(fw_haggle, s2)] == [s2]
    assert isinstance(check_reachable(fw_haggle, "visible(a3)"), NotFound)

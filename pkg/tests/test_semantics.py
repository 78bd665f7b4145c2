import dataclasses
import random
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from napa.core import Framework, FrameworkError, State, initial_state
from napa.oracle import agent_extensions_bruteforce, dung_extensions_bruteforce, union_sets_bruteforce
from napa.relations import adjusted_attacks
from napa.semantics import (
    EmptySemanticsWarning,
    agent_extensions,
    all_agent_extensions,
    dung_extensions,
    multi_agent_union_sets,
)

from gen import plain_framework, random_framework
from scenario import A_D, A_X, A_Y, A_Z


# -- classical semantics -------------------------------------------------------


def test_unattacked_singleton():
    assert dung_extensions({"a"}, set(), "co") == (frozenset({"a"}),)


def test_mutual_attack():
    att = {("a", "b"), ("b", "a")}
    assert set(dung_extensions({"a", "b"}, att, "pr")) == {frozenset("a"), frozenset("b")}
    assert dung_extensions({"a", "b"}, att, "gr") == (frozenset(),)
    assert set(dung_extensions({"a", "b"}, att, "co")) == {frozenset(), frozenset("a"), frozenset("b")}
    # the brute force agrees on all four subsets
    assert dung_extensions_bruteforce({"a", "b"}, att, "co") == {frozenset(), frozenset("a"), frozenset("b")}


def test_self_attacker_and_chain():
    att = {("a", "a"), ("a", "b"), ("b", "c")}
    assert dung_extensions("abc", att, "gr") == (frozenset(),)
    att = {("a", "b"), ("b", "c")}
    assert dung_extensions("abc", att, "gr") == (frozenset("ac"),)


graphs = st.integers(1, 7).flatmap(
    lambda n: st.tuples(
        st.just([f"x{i}" for i in range(n)]),
        st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n),
    )
)


@settings(max_examples=150)
@given(graphs, st.sampled_from(["co", "pr", "gr"]))
def test_dung_matches_bruteforce(graph, sem):
    args, pairs = graph
    att = {(args[i], args[j]) for i, j in pairs}
    assert set(dung_extensions(args, att, sem)) == dung_extensions_bruteforce(args, att, sem)


@settings(max_examples=100)
@given(graphs)
def test_preferred_and_grounded_sit_inside_complete(graph):
    args, pairs = graph
    att = {(args[i], args[j]) for i, j in pairs}
    co = set(dung_extensions(args, att, "co"))
    assert set(dung_extensions(args, att, "pr")) <= co
    (gr,) = dung_extensions(args, att, "gr")
    assert gr in co and all(gr <= c for c in co)


# -- agent semantics on the fixture ----------------------------------------------


def test_fixture_agent_extensions(fw, s0):
    got = {e: x.as_set() for e, x in all_agent_extensions(fw, s0).items()}
    assert got == {"e1": {A_X}, "e2": {A_Y}, "e3": {A_Z}}


def test_fixture_union_set(fw, s0):
    assert multi_agent_union_sets(fw, s0) == (A_D,)


def test_unknown_agent(fw, s0):
    with pytest.raises(FrameworkError):
        agent_extensions(fw, s0, "e9")


def test_invisible_scope_gives_empty_extension():
    fw = Framework.build(["a", "b"], scope={"e": ["a"], "f": ["b"]}, initial_visible=["b"])
    s = initial_state(fw)
    for sem in ("co", "pr", "gr"):
        f2 = dataclasses.replace(fw, semantics={**fw.semantics, "e": type(fw.semantics["e"])(sem)})
        assert agent_extensions(f2, s, "e").as_set() == {frozenset()}


def test_defence_must_come_from_own_scope(fw, s0):
    # with the a8 -> a13 guard removed, e2's a8 attacks e1's a13 and nothing
    # in e1's scope can answer it
    f2 = dataclasses.replace(fw, attacks={**fw.attacks, ("a8", "a13"): frozenset()})
    got = agent_extensions(f2, s0, "e1").as_set()
    assert got == agent_extensions_bruteforce(f2, s0, "e1")
    assert all("a13" not in ext for ext in got)
    assert got == {frozenset({"a12", "a15", "a16"})}


def test_two_agents_two_preferred_each():
    fw = Framework.build(
        ["a", "b", "c", "d"],
        attacks=[("a", "b"), ("b", "a"), ("c", "d"), ("d", "c")],
        scope={"e": ["a", "b"], "f": ["c", "d"]},
        initial_visible="abcd",
    )
    s = initial_state(fw)
    unions = multi_agent_union_sets(fw, s)
    assert set(unions) == {frozenset(p) for p in ("ac", "ad", "bc", "bd")}
    assert set(unions) == union_sets_bruteforce(fw, s)


def test_all_grounded_gives_one_union_set():
    rng = random.Random(7)
    for _ in range(50):
        fw = random_framework(rng)
        fw = dataclasses.replace(fw, semantics={e: type(v)("gr") for e, v in fw.semantics.items()})
        assert len(multi_agent_union_sets(fw, initial_state(fw))) == 1


def test_unowned_arguments_never_enter_union_sets():
    fw = Framework.build(["a", "b"], scope={"e": ["a"]}, initial_visible="ab")
    assert multi_agent_union_sets(fw, initial_state(fw)) == (frozenset("a"),)


# -- properties over random frameworks -------------------------------------------


def _cf(S, att):
    return not any((a, b) in att for a in S for b in S)


def _self_defending(S, att, vis):
    return all(any((d, u) in att for d in S) for x in S for u in vis if (u, x) in att)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_agent_extensions_match_bruteforce(seed):
    fw = random_framework(random.Random(seed), max_args=12)
    s = initial_state(fw)
    att = adjusted_attacks(fw, s)
    with warnings.catch_warnings():
        warnings.simplefilter("error", EmptySemanticsWarning)
        for e in fw.agents:
            got = agent_extensions(fw, s, e)
            assert got.as_set() == agent_extensions_bruteforce(fw, s, e)
            assert len(got) >= 1
            for ext in got:
                assert ext <= fw.scope[e] & s.visible
                assert _cf(ext, att) and _self_defending(ext, att, s.visible)
            if got.semantics.value == "gr":
                assert len(got) == 1
    assert set(multi_agent_union_sets(fw, s)) == union_sets_bruteforce(fw, s)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_semantics_order_on_random_states(seed):
    fw = random_framework(random.Random(seed), max_args=12)
    s = initial_state(fw)
    for e in fw.agents:
        byname = {
            sem: agent_extensions(dataclasses.replace(fw, semantics={**fw.semantics, e: type(fw.semantics[e])(sem)}), s, e).as_set()
            for sem in ("co", "pr", "gr")
        }
        assert byname["pr"] <= byname["co"]
        (gr,) = byname["gr"]
        assert all(gr <= c for c in byname["co"])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_reduces_to_dung_for_one_agent(seed):
    fw = plain_framework(random.Random(seed))
    s = initial_state(fw)
    (e,) = fw.agents
    sub = {(a, b) for a, b in fw.attacks if a in s.visible and b in s.visible}
    expected = set(dung_extensions(s.visible, sub, fw.semantics[e]))
    assert agent_extensions(fw, s, e).as_set() == expected


def test_empty_result_is_warned():
    # an agent with no complete set cannot occur for the fixpoint semantics;
    # force one by hand to exercise the warning path
    from napa import semantics as sem

    fw = Framework.build(["a"], scope={"e": ["a"]}, initial_visible="a")
    s = initial_state(fw)
    orig = sem._extensions
    sem._extensions = lambda *a, **k: []
    try:
        with pytest.warns(EmptySemanticsWarning):
            assert len(agent_extensions(fw, s, "e")) == 0
        with pytest.warns(EmptySemanticsWarning):
            assert multi_agent_union_sets(fw, s) == ()
    finally:
        sem._extensions = orig


def test_state_with_fully_hidden_world():
    fw = Framework.build(["a", "b"], attacks=[("a", "b")], scope={"e": ["a", "b"]})
    s = State(frozenset(), {})
    assert agent_extensions(fw, s, "e").as_set() == {frozenset()}

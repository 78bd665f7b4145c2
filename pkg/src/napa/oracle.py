"""Reference implementations by exhaustive subset enumeration.

Everything here follows the definitions literally and shares nothing with the
optimized code paths except constraint satisfaction. Intended for cross-checks
on small instances (a dozen arguments at most).
"""

from __future__ import annotations

from collections.abc import Iterable
from itertools import chain, combinations

from .constraints import interpret_term, sat
from .core import Framework, Semantics, State, Triple

__all__ = [
    "agent_extensions_bruteforce",
    "apa_successors",
    "dung_extensions_bruteforce",
    "persuasion_sets_bruteforce",
    "successors_bruteforce",
    "union_sets_bruteforce",
]


def _subsets(xs: Iterable) -> Iterable[frozenset]:
    xs = list(xs)
    return (frozenset(c) for c in chain.from_iterable(combinations(xs, k) for k in range(len(xs) + 1)))


def dung_extensions_bruteforce(arguments, attacks, sem) -> set[frozenset]:
    """Classical extensions; preferred as maximal admissible sets."""
    sem = Semantics(sem)
    args = set(arguments)
    att = set(attacks)

    def cf(S):
        return not any((a, b) in att for a in S for b in S)

    def defends(S, x):
        return all(any((d, y) in att for d in S) for y in args if (y, x) in att)

    adm = [S for S in _subsets(args) if cf(S) and all(defends(S, x) for x in S)]
    comp = [S for S in adm if all(x in S for x in args if defends(S, x))]
    if sem is Semantics.COMPLETE:
        return set(comp)
    if sem is Semantics.PREFERRED:
        return {S for S in adm if not any(S < T for T in adm)}
    return {frozenset.intersection(*comp)} if comp else set()


def _attacks_in(fw: Framework, s: State) -> set[tuple[str, str]]:
    out = set()
    for (a, b), cst in fw.attacks.items():
        if a in s.visible and b in s.visible and sat(fw, cst, s.quantities):
            out.add((a, b))
    return out


def agent_extensions_bruteforce(fw: Framework, s: State, agent: str) -> set[frozenset]:
    att = _attacks_in(fw, s)
    vis = s.visible
    scope = fw.scope[agent]

    def cf(S):
        return not any((a, b) in att for a in S for b in S)

    def defends(S, x):
        if x not in vis:
            return True
        return all(any((d, u) in att for d in S) for u in vis if (u, x) in att)

    # proper subsets of the agent's scope
    admissible = [
        S for S in _subsets(sorted(scope & vis)) if cf(S) and all(defends(S, x) for x in S)
    ]
    # only visible scope members can be required; an invisible one is
    # vacuously defended but could never be included by a proper set
    complete = [S for S in admissible if all(x in S for x in scope & vis if defends(S, x))]
    sem = fw.semantics[agent]
    if sem is Semantics.COMPLETE:
        return set(complete)
    if sem is Semantics.PREFERRED:
        return {S for S in complete if not any(S < T for T in complete)}
    return {frozenset.intersection(*complete)} if complete else set()


def union_sets_bruteforce(fw: Framework, s: State) -> set[frozenset]:
    per_agent = {e: agent_extensions_bruteforce(fw, s, e) for e in fw.agents}
    covered = frozenset().union(*fw.scope.values()) & s.visible
    return {
        X
        for X in _subsets(sorted(covered))
        if all(X & fw.scope[e] in per_agent[e] for e in fw.agents)
    }


def _possible(fw: Framework, s: State, X: frozenset, att) -> set[Triple]:
    out = set()
    for r, cst in fw.persuasions.items():
        src, mid, _ = r
        if src not in s.visible or (mid is not None and mid not in s.visible):
            continue
        if not sat(fw, cst, s.quantities):
            continue
        if any((x, src) in att for x in X):
            continue
        out.add(r)
    return out


def _lambda_ok(fw: Framework, s: State, lam: frozenset) -> bool:
    for r in lam:
        hs = fw.handshake.get(r, frozenset())
        if hs and len([p for p in hs if p in lam]) != 1:
            return False
    q = s.quantities
    for a in q:
        inc = sum(_amount(fw, r, q) for r in lam if r.middle is not None and r.target == a and r in fw.amounts)
        dec = sum(_amount(fw, r, q) for r in lam if r.middle == a and r in fw.amounts)
        if q[a] + inc - dec < 0:
            return False
    return True


def _amount(fw, r, q) -> int:
    v = interpret_term(fw, fw.amounts[r], q)
    if v is None:
        raise ValueError(f"undefined amount for {r}")
    return v


def persuasion_sets_bruteforce(fw: Framework, s: State, X: frozenset) -> set[frozenset]:
    att = _attacks_in(fw, s)
    base = set.intersection(*[_possible(fw, s, X & fw.scope[e], att) for e in fw.agents]) if fw.agents else _possible(fw, s, frozenset(), att)
    return {lam for lam in _subsets(sorted(base, key=repr)) if lam and _lambda_ok(fw, s, lam)}


def _fire(fw: Framework, s: State, lam: frozenset) -> State:
    q = s.quantities
    A1 = s.visible
    new = {}
    for a in q:
        inc = sum(_amount(fw, r, q) for r in lam if r.middle is not None and r.target == a and r in fw.amounts)
        dec = sum(_amount(fw, r, q) for r in lam if r.middle == a and r in fw.amounts)
        new[a] = q[a] + inc - dec
    neg = {
        ax for ax in A1
        if any(r[0] in A1 and r[1] == ax for r in lam)
        and (new.get(ax) is None or new[ax] == 0)
    }
    pos = {
        r[2] for r in lam
        if r[0] in A1 and (r[1] is None or r[1] in A1)
        and (new.get(r[2]) is None or new[r[2]] != 0)
    }
    return State((A1 - neg) | pos, new)


def successors_bruteforce(fw: Framework, s: State) -> set[tuple[frozenset, frozenset, State]]:
    return {
        (X, lam, _fire(fw, s, lam))
        for X in union_sets_bruteforce(fw, s)
        for lam in persuasion_sets_bruteforce(fw, s, X)
    }


def apa_successors(arguments, attacks, persuasions, visible, sem) -> set[tuple[frozenset, frozenset]]:
    """Plain persuasion-argumentation transitions ``(agent set, next visible set)``.

    One agent owns every argument; agent sets are its extensions on the
    visible subgraph.
    """
    A1 = frozenset(visible)
    att = {(a, b) for a, b in attacks if a in A1 and b in A1}
    out = set()
    for X in dung_extensions_bruteforce(A1, att, sem):
        gamma = [
            r for r in persuasions
            if r[0] in A1 and (r[1] is None or r[1] in A1)
            and not any((x, r[0]) in att for x in X)
        ]
        for G in _subsets(sorted(gamma, key=repr)):
            if not G:
                continue
            neg = {ax for ax in A1 if any(r[0] in A1 and r[1] == ax for r in G)}
            pos = {r[2] for r in G if r[0] in A1 and (r[1] is None or r[1] in A1)}
            out.add((X, (A1 - neg) | pos))
    return out

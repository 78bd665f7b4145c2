"""Acceptability semantics: plain Dung extensions and per-agent semantics in a state.

Per-agent candidate sets range over the agent's visible scope, while attackers
range over everything visible. Defence must come from the candidate set
itself. Complete sets are enumerated from the grounded set upward with a
bitmask search; :mod:`napa.oracle` holds the subset-enumeration reference.
"""

from __future__ import annotations

import itertools
import warnings
from collections.abc import Iterable
from dataclasses import dataclass

from .core import Framework, FrameworkError, Semantics, State, arg_key, sorted_args
from .relations import adjusted_attacks

__all__ = [
    "EmptySemanticsWarning",
    "ExtensionSet",
    "agent_extensions",
    "all_agent_extensions",
    "canonical_sets",
    "dung_extensions",
    "multi_agent_union_sets",
]


class EmptySemanticsWarning(RuntimeWarning):
    """An agent ended up with no extension at all in some state."""


def set_key(s: Iterable[str]) -> tuple:
    return tuple(arg_key(a) for a in sorted_args(s))


def canonical_sets(sets: Iterable[frozenset]) -> tuple[frozenset, ...]:
    """Deduplicate and order sets by their canonically sorted members."""
    return tuple(sorted(set(sets), key=set_key))


@dataclass(frozen=True)
class ExtensionSet:
    agent: str
    semantics: Semantics
    extensions: tuple  # tuple[frozenset[str], ...] in canonical order

    def __iter__(self):
        return iter(self.extensions)

    def __len__(self) -> int:
        return len(self.extensions)

    def as_set(self) -> set[frozenset]:
        return set(self.extensions)


def _extensions(
    candidates: list[str], attacks: Iterable[tuple[str, str]], sem: Semantics
) -> list[frozenset]:
    idx = {a: i for i, a in enumerate(candidates)}
    n = len(candidates)
    # attackers[i]: all attackers of candidate i; counter[u]: candidates hitting u
    attackers: list[set[str]] = [set() for _ in range(n)]
    counter: dict[str, int] = {}
    conflict = [0] * n
    for u, v in attacks:
        if v in idx:
            attackers[idx[v]].add(u)
        if u in idx:
            counter[v] = counter.get(v, 0) | (1 << idx[u])
            if v in idx:
                conflict[idx[u]] |= 1 << idx[v]
                conflict[idx[v]] |= 1 << idx[u]
    needs = [[counter.get(u, 0) for u in attackers[i]] for i in range(n)]

    def defended(mask: int) -> int:
        out = 0
        for i in range(n):
            if all(m & mask for m in needs[i]):
                out |= 1 << i
        return out

    grounded = 0
    while True:
        nxt = defended(grounded)
        if nxt == grounded:
            break
        grounded = nxt

    def to_set(mask: int) -> frozenset:
        return frozenset(candidates[i] for i in range(n) if mask >> i & 1)

    if sem is Semantics.GROUNDED:
        return [to_set(grounded)]

    free = [
        i
        for i in range(n)
        if not grounded >> i & 1 and not conflict[i] & (grounded | 1 << i)
    ]
    complete: list[int] = []

    def search(k: int, mask: int) -> None:
        if k == len(free):
            if defended(mask) == mask:
                complete.append(mask)
            return
        i = free[k]
        search(k + 1, mask)
        if not conflict[i] & mask:
            search(k + 1, mask | 1 << i)

    search(0, grounded)
    if sem is Semantics.PREFERRED:
        complete = [
            m for m in complete if not any(o != m and o & m == m for o in complete)
        ]
    return [to_set(m) for m in complete]


def dung_extensions(
    arguments: Iterable[str], attacks: Iterable[tuple[str, str]], sem: str | Semantics
) -> tuple[frozenset, ...]:
    """Complete, preferred or grounded extensions of a finite attack graph."""
    sem = Semantics(sem)
    args = sorted_args(set(arguments))
    return canonical_sets(_extensions(args, list(attacks), sem))


def agent_extensions(
    fw: Framework, s: State, agent: str, *, attacks=None
) -> ExtensionSet:
    """The chosen semantics of ``agent`` in state ``s``."""
    if agent not in fw.agents:
        raise FrameworkError(f"unknown agent {agent}")
    if attacks is None:
        attacks = adjusted_attacks(fw, s)
    sem = fw.semantics[agent]
    candidates = sorted_args(fw.scope[agent] & s.visible)
    exts = canonical_sets(_extensions(candidates, attacks, sem))
    if not exts:
        warnings.warn(
            f"agent {agent} has no {sem.name.lower()} extension in {s.describe()}",
            EmptySemanticsWarning,
            stacklevel=2,
        )
    return ExtensionSet(agent, sem, exts)


def all_agent_extensions(fw: Framework, s: State, *, attacks=None) -> dict[str, ExtensionSet]:
    if attacks is None:
        attacks = adjusted_attacks(fw, s)
    return {
        e: agent_extensions(fw, s, e, attacks=attacks)
        for e in sorted(fw.agents, key=arg_key)
    }


def multi_agent_union_sets(fw: Framework, s: State, *, attacks=None) -> tuple[frozenset, ...]:
    """Unions of one extension per agent, in canonical order."""
    per_agent = all_agent_extensions(fw, s, attacks=attacks)
    choices = [ext.extensions for ext in per_agent.values()]
    return canonical_sets(frozenset().union(*combo) for combo in itertools.product(*choices))

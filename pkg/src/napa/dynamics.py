"""Possible persuasions, legal simultaneous persuasion sets and the transition rule."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from .constraints import interpret_term
from .core import (
    QUANTITY_MAX,
    Framework,
    FrameworkError,
    QuantityOverflowError,
    State,
    Triple,
    sorted_args,
    triple_key,
)
from .relations import adjusted_attacks, adjusted_persuasions
from .semantics import multi_agent_union_sets, set_key

__all__ = [
    "DEFAULT_CAP",
    "Enumeration",
    "Problem",
    "ResourceSafetyError",
    "Successors",
    "TransitionEdge",
    "Verdict",
    "adjusted_attacks",
    "adjusted_persuasions",
    "apply",
    "canonical_lambda",
    "enumerate_persuasion_sets",
    "is_valid_persuasion_set",
    "lambda_base",
    "lambda_key",
    "possible_persuasions",
    "resource_balance",
    "successors",
]

DEFAULT_CAP = 10_000


class ResourceSafetyError(ValueError):
    def __init__(self, arg: str, value: int):
        super().__init__(f"resource-safety violated on {arg}: quantity would become {value}")
        self.arg = arg
        self.value = value


def lambda_key(lam: Iterable[Triple]) -> tuple:
    return tuple(sorted(triple_key(r) for r in lam))


def canonical_lambda(lam: Iterable[Triple]) -> list[Triple]:
    return sorted(lam, key=triple_key)


def possible_persuasions(
    fw: Framework, s: State, ax: Iterable[str], *, attacks=None, persuasions=None
) -> frozenset[Triple]:
    """Adjusted persuasions whose source no member of ``ax`` attacks."""
    if attacks is None:
        attacks = adjusted_attacks(fw, s)
    if persuasions is None:
        persuasions = adjusted_persuasions(fw, s)
    ax = set(ax)
    hit = {b for a, b in attacks if a in ax}
    return frozenset(r for r in persuasions if r.source not in hit)


def _lambda_base(fw, s, ax, attacks, persuasions) -> frozenset[Triple]:
    base = persuasions
    for e in fw.agents:
        base = base & possible_persuasions(
            fw, s, ax & fw.scope[e], attacks=attacks, persuasions=persuasions
        )
    return base


def lambda_base(fw: Framework, s: State, ax: Iterable[str]) -> frozenset[Triple]:
    """Persuasions possible with respect to every agent's share of ``ax``."""
    ax = frozenset(ax)
    attacks = adjusted_attacks(fw, s)
    if ax not in multi_agent_union_sets(fw, s, attacks=attacks):
        raise FrameworkError(f"{{{','.join(sorted_args(ax))}}} is not a multi-agent union set")
    return _lambda_base(fw, s, ax, attacks, adjusted_persuasions(fw, s))


# -- validity of a persuasion set --------------------------------------------


@dataclass(frozen=True)
class Problem:
    condition: str  # nonempty | membership | handshake | resource-safety
    detail: str
    element: object = None

    def __str__(self) -> str:
        return f"{self.condition}: {self.detail}"


@dataclass(frozen=True)
class Verdict:
    ok: bool
    problems: tuple = ()

    def __bool__(self) -> bool:
        return self.ok

    def conditions(self) -> set[str]:
        return {p.condition for p in self.problems}


def resource_balance(
    fw: Framework, s: State, lam: Iterable[Triple]
) -> tuple[dict[str, int], list[Triple]]:
    """New quantity of every resource argument under ``lam``.

    Amounts are read against the pre-transition quantities. Also returns the
    conversions whose amount could not be interpreted.
    """
    q = s.quantities
    new = dict(q)
    undefined = []
    for r in lam:
        if not r.is_conversion or r not in fw.amounts:
            continue
        amount = interpret_term(fw, fw.amounts[r], q)
        if amount is None or r.middle not in new or r.target not in new:
            undefined.append(r)
            continue
        new[r.middle] -= amount
        new[r.target] += amount
    return new, undefined


def is_valid_persuasion_set(
    fw: Framework, s: State, lam: Iterable[Triple], base: Iterable[Triple]
) -> Verdict:
    lam = frozenset(lam)
    base = frozenset(base)
    problems = []
    if not lam:
        problems.append(Problem("nonempty", "the persuasion set is empty"))
    for r in canonical_lambda(lam - base):
        problems.append(Problem("membership", f"{r} is not possible in this state", r))
    for r in canonical_lambda(lam):
        partners = fw.partners(r)
        if not partners:
            continue
        present = partners & lam
        if len(present) != 1:
            want = "no" if not present else f"{len(present)}"
            problems.append(
                Problem("handshake", f"{r} has {want} handshake partners present, needs exactly one", r)
            )
    new, undefined = resource_balance(fw, s, lam)
    for r in canonical_lambda(undefined):
        problems.append(Problem("resource-safety", f"amount of {r} is undefined", r))
    for a in sorted_args(new):
        if new[a] < 0:
            problems.append(
                Problem("resource-safety", f"{a} would drop to {new[a]} (has {s.quantities[a]})", a)
            )
    return Verdict(not problems, tuple(problems))


# -- enumeration ---------------------------------------------------------------


@dataclass(frozen=True)
class Enumeration:
    sets: tuple  # tuple[frozenset[Triple], ...]
    truncated: bool = False


def _valid_subsets(fw: Framework, s: State, base: frozenset, cap: int) -> Enumeration:
    items = canonical_lambda(base)
    n = len(items)
    pos = {r: i for i, r in enumerate(items)}
    partners = [[pos[p] for p in fw.partners(r) if p in pos] for r in items]
    needs_partner = [bool(fw.partners(r)) for r in items]
    out: list[frozenset] = []
    truncated = False

    def dead(chosen: list[int], nxt: int) -> bool:
        # a member with a handshake obligation that can no longer be met
        # (or is already overfilled) poisons every extension of this branch
        cs = set(chosen)
        for i in chosen:
            if not needs_partner[i]:
                continue
            present = sum(1 for j in partners[i] if j in cs)
            if present > 1:
                return True
            if present == 0 and not any(j >= nxt for j in partners[i]):
                return True
        return False

    def rec(start: int, chosen: list[int]) -> bool:
        # preorder over combinations yields sets in canonical order
        nonlocal truncated
        for k in range(start, n):
            chosen.append(k)
            if not dead(chosen, k + 1):
                lam = frozenset(items[i] for i in chosen)
                if is_valid_persuasion_set(fw, s, lam, base).ok:
                    if len(out) >= cap:
                        truncated = True
                        return False
                    out.append(lam)
                if not rec(k + 1, chosen):
                    return False
            chosen.pop()
        return True

    rec(0, [])
    return Enumeration(tuple(out), truncated)


def enumerate_persuasion_sets(
    fw: Framework, s: State, ax: Iterable[str], cap: int = DEFAULT_CAP
) -> Enumeration:
    """All legal persuasion sets for union set ``ax``, canonical order, at most ``cap``."""
    if cap < 1:
        raise ValueError("cap must be positive")
    return _valid_subsets(fw, s, lambda_base(fw, s, ax), cap)


# -- transitions ---------------------------------------------------------------


def apply(fw: Framework, s: State, lam: Iterable[Triple]) -> State:
    """Fire ``lam`` simultaneously from ``s``."""
    lam = frozenset(lam)
    new, undefined = resource_balance(fw, s, lam)
    if undefined:
        raise ResourceSafetyError(str(canonical_lambda(undefined)[0]), -1)
    for a in sorted_args(new):
        if new[a] < 0:
            raise ResourceSafetyError(a, new[a])
        if new[a] > QUANTITY_MAX:
            raise QuantityOverflowError(f"quantity of {a} exceeds 64 bits")
    vis = s.visible
    neg = {
        r.middle
        for r in lam
        if r.is_conversion
        and r.source in vis
        and r.middle in vis
        and (r.middle not in new or new[r.middle] == 0)
    }
    pos = {
        r.target
        for r in lam
        if r.source in vis
        and (r.middle is None or r.middle in vis)
        and (r.target not in new or new[r.target] != 0)
    }
    return State((vis - neg) | pos, new)


@dataclass(frozen=True)
class TransitionEdge:
    source: State
    union_set: frozenset
    lam: frozenset
    target: State

    def sort_key(self) -> tuple:
        return (set_key(self.union_set), lambda_key(self.lam))


@dataclass(frozen=True)
class Successors:
    edges: tuple = ()
    truncated: bool = False
    union_sets: tuple = field(default=(), compare=False)

    def __iter__(self):
        return iter(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def targets(self) -> set[State]:
        return {e.target for e in self.edges}


def successors(fw: Framework, s: State, cap: int = DEFAULT_CAP) -> Successors:
    """Every (union set, persuasion set) transition out of ``s``."""
    attacks = adjusted_attacks(fw, s)
    persuasions = adjusted_persuasions(fw, s)
    unions = multi_agent_union_sets(fw, s, attacks=attacks)
    edges = []
    truncated = False
    for ax in unions:
        base = _lambda_base(fw, s, ax, attacks, persuasions)
        found = _valid_subsets(fw, s, base, cap)
        truncated |= found.truncated
        for lam in found.sets:
            edges.append(TransitionEdge(s, ax, lam, apply(fw, s, lam)))
    edges.sort(key=TransitionEdge.sort_key)
    return Successors(tuple(edges), truncated, unions)


"""Grounding and satisfaction of constraint objects.

Undefined interpretations are represented by ``None``. A constraint whose
interpretation is undefined is treated as unsatisfied.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from typing import Optional

from .core import ArgRef, Comparison, Framework, Literal, TripleRef

__all__ = ["interpret_term", "interpret_constraints", "is_ground", "sat", "holds"]


def interpret_term(fw: Framework, term, q: Mapping[str, int]) -> Optional[int]:
    if isinstance(term, Literal):
        return term.value
    if isinstance(term, ArgRef):
        return q.get(term.arg)
    if isinstance(term, TripleRef):
        amount = fw.amounts.get(term.triple)
        # one level of indirection only: amounts are literals or argument refs
        if isinstance(amount, Literal):
            return amount.value
        if isinstance(amount, ArgRef):
            return q.get(amount.arg)
        return None
    raise TypeError(f"not a numeric term: {term!r}")


def interpret_constraints(
    fw: Framework, c: Iterable[Comparison], q: Mapping[str, int]
) -> Optional[frozenset[tuple[int, str, int]]]:
    """Replace every term by its value; ``None`` if any term is undefined."""
    ground = set()
    for cmp in c:
        lhs = interpret_term(fw, cmp.lhs, q)
        rhs = interpret_term(fw, cmp.rhs, q)
        if lhs is None or rhs is None:
            return None
        ground.add((lhs, cmp.op, rhs))
    return frozenset(ground)


def is_ground(c: Iterable[Comparison]) -> bool:
    return all(
        isinstance(cmp.lhs, Literal) and isinstance(cmp.rhs, Literal) for cmp in c
    )


def holds(ground: Iterable[tuple[int, str, int]]) -> bool:
    """Decide a ground constraint object by integer comparison."""
    for lhs, op, rhs in ground:
        if op == "<":
            if not lhs < rhs:
                return False
        elif lhs != rhs:
            return False
    return True


def sat(fw: Framework, c: Iterable[Comparison], q: Mapping[str, int]) -> bool:
    ground = interpret_constraints(fw, c, q)
    return ground is not None and holds(ground)

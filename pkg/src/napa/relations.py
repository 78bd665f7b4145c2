"""Attack and persuasion relations as they stand in a given state."""

from __future__ import annotations

from .constraints import sat
from .core import Framework, State, Triple

__all__ = ["adjusted_attacks", "adjusted_persuasions"]


def adjusted_attacks(fw: Framework, s: State) -> frozenset[tuple[str, str]]:
    """Attacks between visible arguments whose constraint is satisfied."""
    vis, q = s.visible, s.quantities
    return frozenset(
        (a, b)
        for (a, b), cst in fw.attacks.items()
        if a in vis and b in vis and sat(fw, cst, q)
    )


def adjusted_persuasions(fw: Framework, s: State) -> frozenset[Triple]:
    """Inducements with a visible source and conversions with visible source
    and middle, restricted to those whose constraint is satisfied."""
    vis, q = s.visible, s.quantities
    out = []
    for r, cst in fw.persuasions.items():
        if r.source not in vis:
            continue
        if r.middle is not None and r.middle not in vis:
            continue
        if sat(fw, cst, q):
            out.append(r)
    return frozenset(out)

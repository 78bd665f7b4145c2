"""Domain types for numerical persuasion frameworks and their states.

A :class:`Framework` bundles arguments, constraint-guarded attacks and
persuasions, agents with disjoint scopes, handshakes between persuasions,
initial quantities of resource arguments and the amounts moved by
conversions. :func:`validate_framework` reports every well-formedness
violation as data.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Optional, Union

__all__ = [
    "EPS",
    "QUANTITY_MAX",
    "ArgKind",
    "ArgRef",
    "Comparison",
    "Framework",
    "FrameworkError",
    "Literal",
    "QuantityMap",
    "QuantityOverflowError",
    "Semantics",
    "State",
    "Triple",
    "TripleRef",
    "ValidationReport",
    "Violation",
    "arg_key",
    "classify_argument",
    "constraint_key",
    "initial_state",
    "sorted_args",
    "triple_key",
    "validate_framework",
]

#: Largest representable quantity (unsigned 64-bit).
QUANTITY_MAX = 2**64 - 1

#: Middle component of an inducement triple.
EPS = None

_DIGITS = re.compile(r"(\d+)")


class FrameworkError(ValueError):
    """Raised when an operation receives an invalid framework or argument."""

    def __init__(self, message: str, report: "ValidationReport | None" = None):
        super().__init__(message)
        self.report = report


class QuantityOverflowError(ArithmeticError):
    pass


def arg_key(a: str) -> tuple:
    """Canonical sort key for argument ids: natural order, ties by raw text."""
    parts = _DIGITS.split(a)
    return (tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p), a)


def sorted_args(args: Iterable[str]) -> list[str]:
    return sorted(args, key=arg_key)


class Triple(tuple):
    """A persuasion ``(source, middle, target)``; ``middle is None`` for an inducement."""

    __slots__ = ()

    def __new__(cls, source: str, middle: Optional[str], target: str):
        return tuple.__new__(cls, (source, middle, target))

    @property
    def source(self) -> str:
        return self[0]

    @property
    def middle(self) -> Optional[str]:
        return self[1]

    @property
    def target(self) -> str:
        return self[2]

    @property
    def is_conversion(self) -> bool:
        return self[1] is not None

    def __repr__(self) -> str:
        return f"({self[0]},{'eps' if self[1] is None else self[1]},{self[2]})"

    __str__ = __repr__


def triple_key(r: Triple) -> tuple:
    mid = (0, ()) if r.middle is None else (1, arg_key(r.middle))
    return (arg_key(r.source), mid, arg_key(r.target))


# -- numeric terms -----------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class ArgRef:
    """Quantity of a resource argument in the current state."""

    arg: str

    def __str__(self) -> str:
        return f"${self.arg}"


@dataclass(frozen=True)
class TripleRef:
    """Amount attached to a conversion, resolved through the framework."""

    triple: Triple

    def __str__(self) -> str:
        return f"${self.triple}"


NumTerm = Union[Literal, ArgRef, TripleRef]


def _term_key(t: NumTerm) -> tuple:
    if isinstance(t, Literal):
        return (0, t.value)
    if isinstance(t, ArgRef):
        return (1, arg_key(t.arg))
    return (2, triple_key(t.triple))


@dataclass(frozen=True)
class Comparison:
    lhs: NumTerm
    op: str  # "<" or "=="
    rhs: NumTerm

    def __post_init__(self):
        if self.op not in ("<", "=="):
            raise ValueError(f"unknown comparison operator {self.op!r}")

    def __str__(self) -> str:
        return f"{self.lhs} {self.op} {self.rhs}"


def constraint_key(c: Comparison) -> tuple:
    return (_term_key(c.lhs), c.op, _term_key(c.rhs))


ConstraintObject = frozenset  # frozenset[Comparison]; empty = always satisfied


class Semantics(str, enum.Enum):
    COMPLETE = "co"
    PREFERRED = "pr"
    GROUNDED = "gr"


class ArgKind(enum.Enum):
    RESOURCE = "resource"
    ORDINARY = "ordinary"


# -- quantities and states ---------------------------------------------------


class QuantityMap(Mapping):
    """Immutable, hashable map from resource arguments to non-negative amounts."""

    __slots__ = ("_items", "_dict", "_hash")

    def __init__(self, data: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        d = dict(data)
        self._dict = d
        self._items = tuple(sorted(d.items(), key=lambda kv: arg_key(kv[0])))
        self._hash = hash(self._items)

    def __getitem__(self, a: str) -> int:
        return self._dict[a]

    def __iter__(self) -> Iterator[str]:
        return (k for k, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, QuantityMap):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self._dict == dict(other)
        return NotImplemented

    def items_sorted(self) -> tuple[tuple[str, int], ...]:
        return self._items

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self._items)
        return f"QuantityMap({inner})"


@dataclass(frozen=True)
class State:
    """A visible argument set paired with a quantity map."""

    visible: frozenset
    quantities: QuantityMap = field(default_factory=QuantityMap)

    def __post_init__(self):
        if not isinstance(self.visible, frozenset):
            object.__setattr__(self, "visible", frozenset(self.visible))
        if not isinstance(self.quantities, QuantityMap):
            object.__setattr__(self, "quantities", QuantityMap(self.quantities))

    def sort_key(self) -> tuple:
        return (
            tuple(arg_key(a) for a in sorted_args(self.visible)),
            tuple((arg_key(k), v) for k, v in self.quantities.items_sorted()),
        )

    def describe(self) -> str:
        vis = ",".join(sorted_args(self.visible))
        qty = " ".join(f"{k}={v}" for k, v in self.quantities.items_sorted())
        return f"{{{vis}}} [{qty}]"


# -- framework ---------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class Framework:
    """The full tuple. Treat as immutable once built."""

    arguments: frozenset
    attacks: Mapping  # (a, b) -> frozenset[Comparison]
    persuasions: Mapping  # Triple -> frozenset[Comparison]
    agents: frozenset
    scope: Mapping  # agent -> frozenset[str]
    semantics: Mapping  # agent -> Semantics
    initial_visible: frozenset
    handshake: Mapping  # Triple -> frozenset[Triple]
    initial_quantities: QuantityMap
    amounts: Mapping  # Triple -> Literal | ArgRef
    labels: Mapping = field(default_factory=dict)

    __hash__ = None  # type: ignore[assignment]

    def __post_init__(self):
        # normal form so that structurally equal tuples compare equal
        fix = lambda name, value: object.__setattr__(self, name, value)
        fix("arguments", frozenset(self.arguments))
        fix("agents", frozenset(self.agents))
        fix("initial_visible", frozenset(self.initial_visible))
        fix("attacks", {tuple(k): frozenset(v) for k, v in self.attacks.items()})
        fix("persuasions", {Triple(*k): frozenset(v) for k, v in self.persuasions.items()})
        fix("scope", {e: frozenset(v) for e, v in self.scope.items()})
        fix("handshake", {Triple(*k): frozenset(map(lambda t: Triple(*t), v)) for k, v in self.handshake.items() if v})
        if not isinstance(self.initial_quantities, QuantityMap):
            fix("initial_quantities", QuantityMap(self.initial_quantities))
        fix("amounts", {Triple(*k): v for k, v in self.amounts.items()})
        fix("labels", {a: t for a, t in self.labels.items() if t is not None})

    @classmethod
    def build(
        cls,
        arguments: Iterable[str],
        *,
        attacks=(),
        persuasions=(),
        scope: Mapping[str, Iterable[str]] | None = None,
        semantics: Mapping[str, str | Semantics] | None = None,
        initial_visible: Iterable[str] = (),
        handshake=(),
        initial_quantities: Mapping[str, int] | None = None,
        amounts: Mapping | None = None,
        labels: Mapping[str, str] | None = None,
        symmetrize: bool = True,
    ) -> "Framework":
        """Convenience constructor.

        ``attacks`` and ``persuasions`` may be iterables of keys (empty
        constraint) or mappings to constraint iterables. ``handshake`` is an
        iterable of triple pairs or a mapping; pairs are symmetrized unless
        ``symmetrize`` is false.
        """

        def constrained(rel, wrap):
            if isinstance(rel, Mapping):
                return {wrap(k): frozenset(v) for k, v in rel.items()}
            return {wrap(k): frozenset() for k in rel}

        pers = constrained(persuasions, lambda t: Triple(*t))
        hs: dict[Triple, set[Triple]] = {r: set() for r in pers}
        if isinstance(handshake, Mapping):
            for r, partners in handshake.items():
                hs.setdefault(Triple(*r), set()).update(Triple(*p) for p in partners)
        else:
            for r1, r2 in handshake:
                r1, r2 = Triple(*r1), Triple(*r2)
                hs.setdefault(r1, set()).add(r2)
                if symmetrize:
                    hs.setdefault(r2, set()).add(r1)
        scope = scope or {}
        sems = semantics or {}
        amt = {}
        for r, term in (amounts or {}).items():
            if isinstance(term, int):
                term = Literal(term)
            elif isinstance(term, str):
                term = ArgRef(term)
            amt[Triple(*r)] = term
        return cls(
            arguments=frozenset(arguments),
            attacks=constrained(attacks, tuple),
            persuasions=pers,
            agents=frozenset(scope),
            scope={e: frozenset(v) for e, v in scope.items()},
            semantics={e: Semantics(sems.get(e, "pr")) for e in scope},
            initial_visible=frozenset(initial_visible),
            handshake={r: frozenset(p) for r, p in hs.items()},
            initial_quantities=QuantityMap(initial_quantities or {}),
            amounts=amt,
            labels=dict(labels or {}),
        )

    def is_resource(self, a: str) -> bool:
        return a in self.initial_quantities

    @property
    def resource_args(self) -> frozenset:
        return frozenset(self.initial_quantities)

    def partners(self, r: Triple) -> frozenset:
        return self.handshake.get(r, frozenset())

    def owner(self, a: str) -> Optional[str]:
        for e, sc in self.scope.items():
            if a in sc:
                return e
        return None


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    element: object = None

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


class ValidationReport(list):
    """List of :class:`Violation`; empty means the framework is valid."""

    @property
    def ok(self) -> bool:
        return not self

    def codes(self) -> set[str]:
        return {v.code for v in self}


def _term_violations(fw: Framework, term, where) -> Iterator[Violation]:
    if isinstance(term, Literal):
        if not (isinstance(term.value, int) and 0 <= term.value <= QUANTITY_MAX):
            yield Violation("bad-literal", f"literal {term.value!r} in {where} is not a 64-bit natural", where)
    elif isinstance(term, ArgRef):
        if term.arg not in fw.arguments:
            yield Violation("unknown-argument", f"unknown argument {term.arg} in {where}", where)
    elif isinstance(term, TripleRef):
        if term.triple.middle is None:
            yield Violation("bad-term", f"reference to inducement {term.triple} in {where}", where)
        elif term.triple not in fw.persuasions:
            yield Violation("unknown-persuasion", f"reference to unknown persuasion {term.triple} in {where}", where)
    else:
        yield Violation("bad-term", f"unrecognised term {term!r} in {where}", where)


def validate_framework(fw: Framework) -> ValidationReport:
    """Check every well-formedness restriction; never raises."""
    report = ValidationReport()
    add = report.append
    args = fw.arguments

    if not args:
        add(Violation("empty-arguments", "the argument set must be nonempty"))

    for pair in fw.attacks:
        for a in pair:
            if a not in args:
                add(Violation("unknown-argument", f"attack {pair[0]}->{pair[1]} names unknown argument {a}", pair))
    for r in fw.persuasions:
        for a in (r.source, r.middle, r.target):
            if a is not None and a not in args:
                add(Violation("unknown-argument", f"persuasion {r} names unknown argument {a}", r))

    for key, cst in list(fw.attacks.items()) + list(fw.persuasions.items()):
        for cmp in cst:
            for term in (cmp.lhs, cmp.rhs):
                report.extend(_term_violations(fw, term, key))

    # agents and scopes
    if set(fw.scope) != set(fw.agents) or set(fw.semantics) != set(fw.agents):
        add(Violation("agent-maps", "scope and semantics must be defined for exactly the agents"))
    seen: dict[str, str] = {}
    for e in sorted(fw.scope, key=arg_key):
        sc = fw.scope[e]
        if not sc:
            add(Violation("empty-scope", f"agent {e} has an empty scope", e))
        for a in sorted_args(sc):
            if a not in args:
                add(Violation("unknown-argument", f"scope of {e} names unknown argument {a}", e))
            if a in seen:
                add(Violation("scope-overlap", f"argument {a} is in the scopes of both {seen[a]} and {e}", a))
            else:
                seen[a] = e
    for e, sem in fw.semantics.items():
        if not isinstance(sem, Semantics):
            add(Violation("bad-semantics", f"agent {e} has unknown semantics {sem!r}", e))

    # initial state and quantities
    for a in sorted_args(fw.initial_visible):
        if a not in args:
            add(Violation("unknown-argument", f"initial visible set names unknown argument {a}", a))
    for a, n in fw.initial_quantities.items_sorted():
        if a not in args:
            add(Violation("unknown-argument", f"quantity given for unknown argument {a}", a))
        if not isinstance(n, int) or n < 0 or n > QUANTITY_MAX:
            add(Violation("bad-quantity", f"quantity of {a} must be a 64-bit natural, got {n!r}", a))
        elif n == 0 and a in fw.initial_visible:
            add(Violation("visible-zero", f"resource {a} has quantity 0 but is initially visible", a))

    # handshakes
    for r, partners in fw.handshake.items():
        if r not in fw.persuasions:
            add(Violation("unknown-persuasion", f"handshake declared for unknown persuasion {r}", r))
            continue
        for p in sorted(partners, key=triple_key):
            if p not in fw.persuasions:
                add(Violation("unknown-persuasion", f"handshake of {r} names unknown persuasion {p}", r))
            elif p == r:
                add(Violation("handshake-reflexive", f"persuasion {r} is its own handshake partner", r))
            elif r not in fw.handshake.get(p, ()):
                add(Violation("handshake-asymmetric", f"{p} is a partner of {r} but not vice versa", r))

    # amounts
    for r, term in fw.amounts.items():
        if r not in fw.persuasions:
            add(Violation("unknown-persuasion", f"amount given for unknown persuasion {r}", r))
            continue
        if not r.is_conversion:
            add(Violation("amount-on-inducement", f"amount given for inducement {r}", r))
            continue
        if not (fw.is_resource(r.middle) and fw.is_resource(r.target)):
            add(Violation("amount-ordinary", f"amount on {r} whose middle and target are not both resources", r))
        if isinstance(term, ArgRef):
            if not fw.is_resource(term.arg):
                add(Violation("amount-ordinary-ref", f"amount of {r} refers to non-resource {term.arg}", r))
        elif isinstance(term, Literal):
            report.extend(_term_violations(fw, term, r))
        else:
            add(Violation("amount-term", f"amount of {r} must be a literal or an argument reference", r))

    # normality: amounts defined for all conversions sharing a middle, or none
    by_middle: dict[str, list[Triple]] = {}
    for r in fw.persuasions:
        if r.is_conversion:
            by_middle.setdefault(r.middle, []).append(r)
    for mid, group in by_middle.items():
        with_amt = [r for r in group if r in fw.amounts]
        if with_amt and len(with_amt) != len(group):
            for r in sorted(group, key=triple_key):
                if r not in fw.amounts:
                    add(Violation("not-normal", f"conversion {r} lacks an amount although other conversions of {mid} have one", r))
        for r in group:
            if r not in fw.amounts and fw.is_resource(r.middle) and fw.is_resource(r.target):
                add(Violation("amount-missing", f"conversion {r} between resources needs an amount", r))

    return report


def check_valid(fw: Framework) -> None:
    report = validate_framework(fw)
    if report:
        raise FrameworkError("invalid framework: " + "; ".join(map(str, report)), report)


def initial_state(fw: Framework) -> State:
    check_valid(fw)
    return State(fw.initial_visible, fw.initial_quantities)


def classify_argument(fw: Framework, a: str) -> ArgKind:
    if a not in fw.arguments:
        raise FrameworkError(f"unknown argument {a}")
    return ArgKind.RESOURCE if fw.is_resource(a) else ArgKind.ORDINARY

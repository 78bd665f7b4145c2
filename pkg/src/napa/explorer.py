"""Reachable state space, reachability queries and replayable traces."""

from __future__ import annotations

import hashlib
import operator
import re
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

from .core import Framework, FrameworkError, State, Triple, initial_state, sorted_args
from .dsl import serialize
from .dynamics import (
    DEFAULT_CAP,
    apply,
    canonical_lambda,
    is_valid_persuasion_set,
    lambda_base,
    successors,
)
from .semantics import multi_agent_union_sets

__all__ = [
    "FailedAt",
    "Inconclusive",
    "InvariantViolation",
    "NotFound",
    "Query",
    "QueryError",
    "StateGraph",
    "Trace",
    "TraceStep",
    "Verified",
    "check_reachable",
    "check_state_invariants",
    "explore",
    "framework_hash",
    "parse_query",
    "parse_trace",
    "replay",
    "serialize_trace",
    "state_id",
    "validate_query",
]

DEFAULT_MAX_STATES = 100_000


def framework_hash(fw: Framework) -> str:
    return "sha256:" + hashlib.sha256(serialize(fw).encode()).hexdigest()


def state_id(s: State) -> str:
    """Short content hash used to address states on the command line."""
    return hashlib.sha256(s.describe().encode()).hexdigest()[:12]


class InvariantViolation(AssertionError):
    pass


def check_state_invariants(fw: Framework, s: State) -> None:
    if set(s.quantities) != set(fw.initial_quantities):
        raise InvariantViolation(f"quantity domain changed in {s.describe()}")
    for a, n in s.quantities.items_sorted():
        if n < 0:
            raise InvariantViolation(f"{a} has negative quantity {n}")
        if n == 0 and a in s.visible:
            raise InvariantViolation(f"{a} is visible with quantity 0")
    if not s.visible <= fw.arguments:
        raise InvariantViolation("visible set contains unknown arguments")


# -- state graph -------------------------------------------------------------


@dataclass
class StateGraph:
    initial: State
    states: list = field(default_factory=list)  # discovery (BFS) order
    edges: list = field(default_factory=list)
    truncated: bool = False
    parent: dict = field(default_factory=dict, repr=False)  # state -> discovering edge

    def __contains__(self, s: State) -> bool:
        return s in self.parent or s == self.initial

    def __len__(self) -> int:
        return len(self.states)

    def state_set(self) -> set[State]:
        return set(self.states)

    def edge_set(self) -> set[tuple]:
        return {(e.source, e.union_set, e.lam, e.target) for e in self.edges}

    def find(self, sid: str) -> Optional[State]:
        for s in self.states:
            if state_id(s) == sid:
                return s
        return None

    def path_to(self, s: State) -> "Trace":
        steps = []
        while s != self.initial:
            e = self.parent[s]
            steps.append(TraceStep(e.union_set, e.lam, e.target))
            s = e.source
        return Trace(self.initial, tuple(reversed(steps)))


def _bfs(
    fw: Framework,
    max_states: int,
    cap: int,
    goal: Optional[Callable[[State], bool]] = None,
    workers: int = 1,
    check: bool = False,
) -> tuple[StateGraph, Optional[State]]:
    if max_states < 1:
        raise ValueError("max_states must be positive")
    s0 = initial_state(fw)
    if check:
        check_state_invariants(fw, s0)
    g = StateGraph(s0, [s0])
    seen = {s0}
    if goal is not None and goal(s0):
        return g, s0
    frontier = [s0]
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while frontier:
            expand = lambda s: successors(fw, s, cap)
            results = list(pool.map(expand, frontier)) if pool else [expand(s) for s in frontier]
            nxt = []
            for succ in results:
                g.truncated |= succ.truncated
                for e in succ.edges:
                    t = e.target
                    if t not in seen:
                        if len(g.states) >= max_states:
                            g.truncated = True
                            continue
                        if check:
                            check_state_invariants(fw, t)
                        seen.add(t)
                        g.states.append(t)
                        g.parent[t] = e
                        nxt.append(t)
                        if goal is not None and goal(t):
                            g.edges.append(e)
                            return g, t
                    g.edges.append(e)
            frontier = nxt
    finally:
        if pool:
            pool.shutdown()
    return g, None


def explore(
    fw: Framework,
    max_states: int = DEFAULT_MAX_STATES,
    *,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
    check: bool = False,
) -> StateGraph:
    """Breadth-first closure of the transition relation from the initial state.

    Stops adding states once ``max_states`` are stored and flags the graph as
    truncated. ``check`` re-verifies the safety invariants on every new state.
    """
    g, _ = _bfs(fw, max_states, cap, workers=workers, check=check)
    return g


# -- queries -----------------------------------------------------------------

_OPS = {
    "==": operator.eq,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}
_ATOM = re.compile(
    r"""\s*(?:
        (?P<neg>!|not-|not\s+)?visible\(\s*(?P<vis>[A-Za-z_][A-Za-z0-9_.']*)\s*\)
      | qty\(\s*(?P<qarg>[A-Za-z_][A-Za-z0-9_.']*)\s*\)\s*(?P<op>==|<=|>=|<|>)\s*(?P<num>\d+)
    )\s*$""",
    re.VERBOSE,
)


class QueryError(ValueError):
    pass


@dataclass(frozen=True)
class Atom:
    kind: str  # visible | not-visible | qty
    arg: str
    op: str = ""
    value: int = 0

    def holds(self, s: State) -> bool:
        if self.kind == "visible":
            return self.arg in s.visible
        if self.kind == "not-visible":
            return self.arg not in s.visible
        return _OPS[self.op](s.quantities[self.arg], self.value)

    def __str__(self) -> str:
        if self.kind == "qty":
            return f"qty({self.arg}) {self.op} {self.value}"
        return f"{self.kind}({self.arg})"


@dataclass(frozen=True)
class Query:
    atoms: tuple

    def __call__(self, s: State) -> bool:
        return all(a.holds(s) for a in self.atoms)

    def __str__(self) -> str:
        return " && ".join(map(str, self.atoms))


def parse_query(text: str, fw: Optional[Framework] = None) -> Query:
    """Parse ``atom && atom ...``; atoms are ``visible(a)``, ``not-visible(a)``
    (also ``!visible(a)``) and ``qty(a) OP n`` with OP in ``== < <= > >=``."""
    atoms = []
    for part in text.split("&&"):
        m = _ATOM.match(part)
        if not m:
            raise QueryError(f"malformed query atom {part.strip()!r}")
        if m.group("vis"):
            kind = "not-visible" if m.group("neg") else "visible"
            atoms.append(Atom(kind, m.group("vis")))
        else:
            atoms.append(Atom("qty", m.group("qarg"), m.group("op"), int(m.group("num"))))
    q = Query(tuple(atoms))
    if fw is not None:
        validate_query(q, fw)
    return q


def validate_query(q: Query, fw: Framework) -> None:
    for a in q.atoms:
        if a.arg not in fw.arguments:
            raise QueryError(f"query names unknown argument {a.arg}")
        if a.kind == "qty" and not fw.is_resource(a.arg):
            raise QueryError(f"qty() needs a resource argument, {a.arg} is ordinary")


# -- traces ------------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    union_set: frozenset
    lam: frozenset
    state: State


@dataclass(frozen=True)
class Trace:
    initial: State
    steps: tuple = ()

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def final(self) -> State:
        return self.steps[-1].state if self.steps else self.initial

    def states(self) -> list[State]:
        return [self.initial] + [st.state for st in self.steps]


@dataclass(frozen=True)
class NotFound:
    explored: int


@dataclass(frozen=True)
class Inconclusive:
    explored: int
    truncated: bool = True


def check_reachable(
    fw: Framework,
    query: Union[Query, str],
    max_states: int = DEFAULT_MAX_STATES,
    *,
    cap: int = DEFAULT_CAP,
) -> Union[Trace, NotFound, Inconclusive]:
    """Shortest witness trace to a state satisfying ``query``."""
    if isinstance(query, str):
        query = parse_query(query, fw)
    else:
        validate_query(query, fw)
    g, hit = _bfs(fw, max_states, cap, goal=query)
    if hit is not None:
        return g.path_to(hit)
    if g.truncated:
        return Inconclusive(len(g.states))
    return NotFound(len(g.states))


def _fmt_set(xs: Iterable[str]) -> str:
    return "{" + ",".join(sorted_args(xs)) + "}"


def _fmt_triple(r: Triple) -> str:
    return f"({r.source},{'eps' if r.middle is None else r.middle},{r.target})"


def serialize_trace(fw: Framework, trace: Trace) -> str:
    """Line 1 is the framework hash; then one step per line::

        {union set} | (src,mid|eps,tgt) ... | {visible} | a=n ...
    """
    lines = [framework_hash(fw)]
    for st in trace.steps:
        lam = " ".join(_fmt_triple(r) for r in canonical_lambda(st.lam))
        qty = " ".join(f"{a}={n}" for a, n in st.state.quantities.items_sorted())
        lines.append(f"{_fmt_set(st.union_set)} | {lam} | {_fmt_set(st.state.visible)} | {qty}")
    return "\n".join(lines) + "\n"


class TraceFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


_TRIPLE = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


def _parse_set(text: str, lineno: int) -> frozenset:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise TraceFormatError(lineno, f"expected a braced argument list, got {text!r}")
    inner = text[1:-1].strip()
    return frozenset(a.strip() for a in inner.split(",")) if inner else frozenset()


def parse_trace(text: str) -> tuple[str, list[tuple[frozenset, frozenset, State]]]:
    lines = text.replace("\r\n", "\n").split("\n")
    body = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        raise TraceFormatError(1, "empty trace")
    _, header = body[0]
    steps = []
    for lineno, ln in body[1:]:
        parts = ln.split("|")
        if len(parts) != 4:
            raise TraceFormatError(lineno, "expected 4 '|'-separated fields")
        ax = _parse_set(parts[0], lineno)
        lam_text = parts[1].strip()
        found = _TRIPLE.findall(lam_text)
        if _TRIPLE.sub("", lam_text).strip():
            raise TraceFormatError(lineno, "malformed persuasion list")
        lam = frozenset(Triple(a, None if m == "eps" else m, b) for a, m, b in found)
        vis = _parse_set(parts[2], lineno)
        qty = {}
        for item in parts[3].split():
            name, sep, val = item.partition("=")
            if not sep or not val.isdigit():
                raise TraceFormatError(lineno, f"malformed quantity {item!r}")
            qty[name] = int(val)
        steps.append((ax, lam, State(vis, qty)))
    return header.strip(), steps


@dataclass(frozen=True)
class Verified:
    steps: int


@dataclass(frozen=True)
class FailedAt:
    step: int
    reason: str  # hash | format | union-set | nonempty | membership | handshake | resource-safety | state
    detail: str = ""
    element: object = None

    def __str__(self) -> str:
        return f"step {self.step}: {self.reason}: {self.detail}"


def replay(fw: Framework, trace: Union[str, Trace]) -> Union[Verified, FailedAt]:
    """Re-execute a trace, checking every union set, persuasion set and state."""
    if isinstance(trace, Trace):
        header = framework_hash(fw)
        steps = [(st.union_set, st.lam, st.state) for st in trace.steps]
    else:
        try:
            header, steps = parse_trace(trace)
        except TraceFormatError as exc:
            return FailedAt(0, "format", str(exc))
    if header != framework_hash(fw):
        return FailedAt(0, "hash", f"trace was recorded for {header}")
    try:
        s = initial_state(fw)
    except FrameworkError as exc:
        return FailedAt(0, "framework", str(exc))
    for i, (ax, lam, recorded) in enumerate(steps, start=1):
        if ax not in multi_agent_union_sets(fw, s):
            return FailedAt(i, "union-set", f"{_fmt_set(ax)} is not a multi-agent union set", ax)
        verdict = is_valid_persuasion_set(fw, s, lam, lambda_base(fw, s, ax))
        if not verdict.ok:
            p = verdict.problems[0]
            return FailedAt(i, p.condition, p.detail, p.element)
        s = apply(fw, s, lam)
        if s != recorded:
            return FailedAt(i, "state", f"expected {s.describe()}, trace has {recorded.describe()}")
    return Verified(len(steps))


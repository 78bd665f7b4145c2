"""Command-line interface: ``napa validate|semantics|successors|explore|replay|step``.

Exit codes: 0 success or query witnessed, 1 parse/validation/replay failure,
2 query not reachable, 3 inconclusive (state cap hit), 4 internal error.
Diagnostics go to stderr, payload to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, TextIO

from .core import Framework, FrameworkError, State, initial_state, sorted_args
from .dsl import ParseError, parse_file
from .dynamics import DEFAULT_CAP, canonical_lambda, successors
from .explorer import (
    DEFAULT_MAX_STATES,
    FailedAt,
    NotFound,
    QueryError,
    Trace,
    TraceStep,
    check_reachable,
    explore,
    parse_query,
    replay,
    serialize_trace,
    state_id,
)
from .semantics import all_agent_extensions, multi_agent_union_sets

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_UNREACHABLE = 2
EXIT_INCONCLUSIVE = 3
EXIT_INTERNAL = 4


class _Fail(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def _default_max_states() -> int:
    env = os.environ.get("NAPA_MAX_STATES")
    if env:
        try:
            value = int(env)
            if value > 0:
                return value
        except ValueError:
            pass
        print(f"napa: ignoring invalid NAPA_MAX_STATES={env!r}", file=sys.stderr)
    return DEFAULT_MAX_STATES


# -- rendering ---------------------------------------------------------------


def _triple(r) -> str:
    return f"({r.source},{'eps' if r.middle is None else r.middle},{r.target})"


def state_json(s: State) -> dict:
    return {
        "id": state_id(s),
        "visible": sorted_args(s.visible),
        "quantities": [[a, n] for a, n in s.quantities.items_sorted()],
    }


def _edge_json(e) -> dict:
    return {
        "union_set": sorted_args(e.union_set),
        "lambda": [_triple(r) for r in canonical_lambda(e.lam)],
        "target": state_json(e.target),
    }


def _emit(out: TextIO, doc) -> None:
    out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _fmt_set(xs) -> str:
    return "{" + ", ".join(sorted_args(xs)) + "}"


# -- commands ----------------------------------------------------------------


def _load(path: str) -> Framework:
    try:
        return parse_file(path)
    except OSError as exc:
        raise _Fail(EXIT_INVALID, f"{path}: {exc.strerror}") from None
    except ParseError as exc:
        for d in exc.diagnostics:
            print(f"{path}:{d}", file=sys.stderr)
        raise _Fail(EXIT_INVALID) from None


def _resolve_state(fw: Framework, sid: Optional[str], max_states: int) -> State:
    s0 = initial_state(fw)
    if sid is None or sid == state_id(s0):
        return s0
    g = explore(fw, max_states)
    s = g.find(sid)
    if s is None:
        more = " (exploration truncated)" if g.truncated else ""
        raise _Fail(EXIT_INVALID, f"no reachable state with id {sid}{more}")
    return s


def cmd_validate(args, out: TextIO) -> int:
    fw = _load(args.file)
    if args.format == "json":
        _emit(out, {"valid": True, "arguments": len(fw.arguments), "agents": sorted_args(fw.agents)})
    else:
        out.write(f"{args.file}: ok ({len(fw.arguments)} arguments, {len(fw.agents)} agents)\n")
    return EXIT_OK


def cmd_semantics(args, out: TextIO) -> int:
    fw = _load(args.file)
    s = _resolve_state(fw, args.state, args.max_states)
    exts = all_agent_extensions(fw, s)
    unions = multi_agent_union_sets(fw, s)
    if args.format == "json":
        _emit(out, {
            "state": state_json(s),
            "agents": {
                e: {"semantics": x.semantics.value, "extensions": [sorted_args(ext) for ext in x]}
                for e, x in exts.items()
            },
            "union_sets": [sorted_args(u) for u in unions],
        })
        return EXIT_OK
    out.write(f"state {state_id(s)}: {s.describe()}\n")
    for e, x in exts.items():
        sets = ", ".join(_fmt_set(ext) for ext in x) or "(none)"
        out.write(f"  {e} [{x.semantics.value}]: {sets}\n")
    out.write(f"  union sets: {', '.join(_fmt_set(u) for u in unions) or '(none)'}\n")
    return EXIT_OK


def cmd_successors(args, out: TextIO) -> int:
    fw = _load(args.file)
    s = _resolve_state(fw, args.state, args.max_states)
    succ = successors(fw, s, args.cap)
    if succ.truncated:
        print("napa: persuasion-set enumeration truncated", file=sys.stderr)
    if args.format == "json":
        _emit(out, {
            "state": state_json(s),
            "edges": [_edge_json(e) for e in succ.edges],
            "truncated": succ.truncated,
        })
        return EXIT_OK
    out.write(f"state {state_id(s)}: {s.describe()}\n")
    out.write(f"{len(succ.edges)} option(s)\n")
    for i, e in enumerate(succ.edges, 1):
        lam = " ".join(_triple(r) for r in canonical_lambda(e.lam))
        out.write(f"  [{i}] {lam}\n      union set {_fmt_set(e.union_set)}\n")
        out.write(f"      -> {state_id(e.target)}: {e.target.describe()}\n")
    return EXIT_OK


def _write_trace(fw: Framework, trace: Trace, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(serialize_trace(fw, trace))


def cmd_explore(args, out: TextIO) -> int:
    fw = _load(args.file)
    if args.query:
        try:
            q = parse_query(args.query, fw)
        except QueryError as exc:
            raise _Fail(EXIT_INVALID, str(exc)) from None
        result = check_reachable(fw, q, args.max_states, cap=args.cap)
        if isinstance(result, Trace):
            _write_trace(fw, result, args.trace_out)
            if args.format == "json":
                _emit(out, {
                    "result": "witnessed",
                    "query": str(q),
                    "trace": [
                        {"union_set": sorted_args(st.union_set),
                         "lambda": [_triple(r) for r in canonical_lambda(st.lam)],
                         "state": state_json(st.state)}
                        for st in result.steps
                    ],
                    "initial": state_json(result.initial),
                })
            else:
                out.write(f"witnessed in {len(result)} step(s): {q}\n")
                out.write(serialize_trace(fw, result))
            return EXIT_OK
        if isinstance(result, NotFound):
            status, code = "unreachable", EXIT_UNREACHABLE
        else:
            status, code = "inconclusive", EXIT_INCONCLUSIVE
        if args.format == "json":
            _emit(out, {"result": status, "query": str(q), "explored": result.explored})
        else:
            out.write(f"{status}: {q} ({result.explored} states explored)\n")
        return code

    g = explore(fw, args.max_states, cap=args.cap)
    if args.format == "json":
        _emit(out, {
            "initial": state_id(g.initial),
            "states": [state_json(s) for s in g.states],
            "edges": [dict(_edge_json(e), source=state_id(e.source)) for e in g.edges],
            "truncated": g.truncated,
        })
    else:
        out.write(f"{len(g.states)} state(s), {len(g.edges)} edge(s)"
                  f"{' [truncated]' if g.truncated else ''}\n")
        for s in g.states:
            out.write(f"  {state_id(s)}: {s.describe()}\n")
    return EXIT_INCONCLUSIVE if g.truncated else EXIT_OK


def cmd_replay(args, out: TextIO) -> int:
    fw = _load(args.file)
    try:
        with open(args.trace, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _Fail(EXIT_INVALID, f"{args.trace}: {exc.strerror}") from None
    result = replay(fw, text)
    if isinstance(result, FailedAt):
        if args.format == "json":
            _emit(out, {"result": "failed", "step": result.step, "reason": result.reason, "detail": result.detail})
        print(f"napa: replay failed at {result}", file=sys.stderr)
        return EXIT_INVALID
    if args.format == "json":
        _emit(out, {"result": "verified", "steps": result.steps})
    else:
        out.write(f"verified ({result.steps} step(s))\n")
    return EXIT_OK


def cmd_step(args, out: TextIO, inp: TextIO = None) -> int:
    inp = inp or sys.stdin
    fw = _load(args.file)
    s = initial_state(fw)
    trace = Trace(s)
    while True:
        out.write(f"\nstate {state_id(s)}: {s.describe()}\n")
        for e, x in all_agent_extensions(fw, s).items():
            out.write(f"  {e} [{x.semantics.value}]: {', '.join(_fmt_set(ext) for ext in x) or '(none)'}\n")
        succ = successors(fw, s, args.cap)
        for i, e in enumerate(succ.edges, 1):
            lam = " ".join(_triple(r) for r in canonical_lambda(e.lam))
            out.write(f"  [{i}] {lam}  (union set {_fmt_set(e.union_set)})\n")
        if not succ.edges:
            out.write("  no transitions available\n")
        out.write("choose a number, 't' to print the trace, 'q' to quit> ")
        out.flush()
        line = inp.readline()
        if not line:
            break
        cmd = line.strip()
        if cmd in ("q", "quit", "exit"):
            break
        if cmd == "t":
            out.write(serialize_trace(fw, trace))
            continue
        try:
            choice = int(cmd)
            if choice < 1:
                raise IndexError
            edge = succ.edges[choice - 1]
        except (ValueError, IndexError):
            out.write(f"invalid choice {cmd!r}\n")
            continue
        s = edge.target
        trace = Trace(trace.initial, trace.steps + (TraceStep(edge.union_set, edge.lam, s),))
    out.write("\n")
    _write_trace(fw, trace, args.trace_out)
    if args.trace_out:
        out.write(f"trace written to {args.trace_out}\n")
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="napa", description="Numerical persuasion argumentation engine")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, state=False):
        sp.add_argument("file", help=".napa framework file")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--max-states", type=int, default=_default_max_states())
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="persuasion sets per union set")
        if state:
            sp.add_argument("--state", help="state id printed by explore (default: initial state)")
        return sp

    common(sub.add_parser("validate", help="parse and validate a framework"))
    common(sub.add_parser("semantics", help="per-agent extensions in a state"), state=True)
    common(sub.add_parser("successors", help="list legal transitions from a state"), state=True)
    ex = common(sub.add_parser("explore", help="explore reachable states / answer a query"))
    ex.add_argument("--query", help="e.g. 'qty(a11)==1 && visible(a3)'")
    ex.add_argument("--trace-out", help="write the witness trace here")
    rp = common(sub.add_parser("replay", help="re-check a recorded trace"))
    rp.add_argument("trace")
    st = common(sub.add_parser("step", help="interactively step through a negotiation"))
    st.add_argument("--trace-out", help="write the recorded trace here on exit")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "semantics": cmd_semantics,
    "successors": cmd_successors,
    "explore": cmd_explore,
    "replay": cmd_replay,
    "step": cmd_step,
}


def main(argv=None, out: TextIO = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if args.max_states < 1 or args.cap < 1:
        print("napa: --max-states and --cap must be positive", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](args, out)
    except _Fail as exc:
        if str(exc):
            print(f"napa: {exc}", file=sys.stderr)
        return exc.code
    except FrameworkError as exc:
        print(f"napa: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"napa: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

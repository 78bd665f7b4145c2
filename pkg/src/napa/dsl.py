"""The ``.napa`` text format: parser with source spans, and canonical serializer.

Example::

    agent e1 semantics pr { a1 a2 }
    arg a1 "Dollars required."
    arg a2
    qty a2 = 650
    init { a1 a2 }
    convert a1 : a2 => a3 amount 300 when [ $a2 < $(a1,a2,a3) ]
    handshake (a1,a2,a3) ~ (a4,a5,a6)

``$x`` is the quantity of argument ``x``; ``$(s,m,t)`` the amount attached to
a conversion; ``eps`` stands for the empty middle of an inducement.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Optional

from .core import (
    ArgRef,
    Comparison,
    Framework,
    Literal,
    Semantics,
    Triple,
    TripleRef,
    arg_key,
    constraint_key,
    sorted_args,
    triple_key,
    validate_framework,
)

__all__ = ["Diagnostic", "ParseError", "SourceSpan", "parse", "parse_file", "serialize"]

KEYWORDS = frozenset(
    "agent semantics arg init qty attack induce convert handshake when amount eps".split()
)
STATEMENTS = frozenset("agent arg init qty attack induce convert handshake".split())
_MAX_DIGITS = 20


@dataclass(frozen=True)
class SourceSpan:
    """1-based line/column range; ``end_col`` is exclusive."""

    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        if self.end_line != self.line:
            return f"{self.line}:{self.col}-{self.end_line}:{self.end_col}"
        return f"{self.line}:{self.col}-{self.end_col}"

    def cover(self, other: "SourceSpan") -> "SourceSpan":
        return SourceSpan(self.line, self.col, other.end_line, other.end_col)

    def contains(self, other: "SourceSpan") -> bool:
        return (self.line, self.col) <= (other.line, other.col) and (
            other.end_line,
            other.end_col,
        ) <= (self.end_line, self.end_col)


_START = SourceSpan(1, 1, 1, 1)


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: SourceSpan
    code: str = "syntax"

    def __str__(self) -> str:
        return f"{self.span}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(map(str, self.diagnostics)))


# -- lexer -------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<nat>[0-9]+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_.']*)
  | (?P<punct>==|=>|->|[{}()\[\],:=<~$])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # word | nat | string | punct | eof
    text: str
    span: SourceSpan


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, line_start, i = 1, 0, 0
    n = len(text)
    while i < n:
        m = _TOKEN.match(text, i)
        col = i - line_start + 1
        if m is None:
            # skip one bad character and carry on
            diags.append(Diagnostic(f"unexpected character {text[i]!r}", SourceSpan(line, col, line, col + 1), "lexical"))
            i += 1
            continue
        kind = m.lastgroup
        value = m.group()
        end = m.end()
        if kind == "nl":
            line += 1
            line_start = end
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, SourceSpan(line, col, line, col + len(value))))
        i = end
    col = n - line_start + 1
    tokens.append(Token("eof", "", SourceSpan(line, col, line, col)))
    return tokens, diags


# -- parser ------------------------------------------------------------------


class _Syntax(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


@dataclass
class _Collected:
    agents: dict
    args: dict
    init: Optional[tuple]
    qty: dict
    attacks: dict
    persuasions: dict
    amounts: dict
    handshakes: list
    refs: list  # (arg id, span) occurrences to resolve
    triple_refs: list  # (triple, span, what)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.diags: list[Diagnostic] = []
        self.c = _Collected({}, {}, None, {}, {}, {}, {}, [], [], [])

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, msg: str, span: Optional[SourceSpan] = None, code: str = "syntax"):
        raise _Syntax(Diagnostic(msg, span or self.tok.span, code))

    def describe(self, t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def expect(self, text: str) -> Token:
        t = self.tok
        if t.kind in ("punct", "word") and t.text == text:
            return self.advance()
        self.error(f"expected {text!r}, found {self.describe(t)}")

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("punct", "word") and t.text == text

    def ident(self, what: str = "identifier") -> Token:
        t = self.tok
        if t.kind != "word":
            self.error(f"expected {what}, found {self.describe(t)}")
        if t.text in KEYWORDS:
            self.error(f"{t.text!r} is a reserved word and cannot be used as {what}")
        return self.advance()

    def arg(self) -> Token:
        t = self.ident("argument id")
        self.c.refs.append((t.text, t.span))
        return t

    def nat(self) -> tuple[int, SourceSpan]:
        t = self.tok
        if t.kind != "nat":
            self.error(f"expected a natural number, found {self.describe(t)}")
        if len(t.text) > _MAX_DIGITS:
            self.error("number too large", t.span)
        self.advance()
        return int(t.text), t.span

    # grammar
    def parse(self):
        while self.tok.kind != "eof":
            start = self.i
            try:
                self.statement()
            except _Syntax as exc:
                self.diags.append(exc.diag)
                self.recover(start)
        return self.c

    def recover(self, start: int):
        if self.i == start:
            self.advance()
        while self.tok.kind != "eof" and not (self.tok.kind == "word" and self.tok.text in STATEMENTS):
            self.advance()

    def statement(self):
        t = self.tok
        if t.kind != "word" or t.text not in STATEMENTS:
            self.error(f"expected a statement keyword, found {self.describe(t)}")
        getattr(self, "stmt_" + t.text)(self.advance())

    def stmt_agent(self, kw: Token):
        name = self.ident("agent id")
        self.expect("semantics")
        sem_tok = self.tok
        if sem_tok.kind != "word" or sem_tok.text not in ("co", "pr", "gr"):
            self.error(f"expected co, pr or gr, found {self.describe(sem_tok)}")
        self.advance()
        self.expect("{")
        members = []
        while not self.at("}"):
            members.append(self.arg())
        close = self.expect("}")
        if not members:
            self.error(f"agent {name.text} needs at least one argument", kw.span.cover(close.span), "semantic")
        span = kw.span.cover(close.span)
        if name.text in self.c.agents:
            self.error(f"duplicate agent {name.text}", span, "semantic")
        self.c.agents[name.text] = (Semantics(sem_tok.text), [m.text for m in members], span, members)

    def stmt_arg(self, kw: Token):
        name = self.ident("argument id")
        label = None
        end = name.span
        if self.tok.kind == "string":
            t = self.advance()
            try:
                label = json.loads(t.text)
            except ValueError:
                self.error("malformed string literal", t.span, "lexical")
            end = t.span
        span = kw.span.cover(end)
        if name.text in self.c.args:
            self.error(f"duplicate argument {name.text}", span, "semantic")
        self.c.args[name.text] = (label, span)

    def stmt_init(self, kw: Token):
        self.expect("{")
        members = []
        while not self.at("}"):
            members.append(self.arg())
        close = self.expect("}")
        span = kw.span.cover(close.span)
        if self.c.init is not None:
            self.error("duplicate init statement", span, "semantic")
        self.c.init = ([m.text for m in members], span)

    def stmt_qty(self, kw: Token):
        name = self.arg()
        self.expect("=")
        value, vspan = self.nat()
        span = kw.span.cover(vspan)
        if name.text in self.c.qty:
            self.error(f"duplicate quantity for {name.text}", span, "semantic")
        self.c.qty[name.text] = (value, span)

    def stmt_attack(self, kw: Token):
        a = self.arg()
        self.expect("->")
        b = self.arg()
        cst, end = self.when(b.span)
        span = kw.span.cover(end)
        key = (a.text, b.text)
        if key in self.c.attacks:
            self.error(f"duplicate attack {a.text} -> {b.text}", span, "semantic")
        self.c.attacks[key] = (cst, span)

    def stmt_induce(self, kw: Token):
        a = self.arg()
        self.expect("=>")
        b = self.arg()
        cst, end = self.when(b.span)
        self.add_persuasion(Triple(a.text, None, b.text), cst, kw.span.cover(end))

    def stmt_convert(self, kw: Token):
        a = self.arg()
        self.expect(":")
        m = self.arg()
        self.expect("=>")
        b = self.arg()
        end = b.span
        amount = None
        if self.at("amount"):
            akw = self.advance()
            amount, end = self.term()
            if isinstance(amount, TripleRef):
                self.error("an amount must be a number or an argument quantity", akw.span.cover(end), "semantic")
        cst, end = self.when(end)
        r = Triple(a.text, m.text, b.text)
        span = kw.span.cover(end)
        self.add_persuasion(r, cst, span)
        if amount is not None:
            self.c.amounts[r] = amount

    def add_persuasion(self, r: Triple, cst, span):
        if r in self.c.persuasions:
            self.error(f"duplicate persuasion {r}", span, "semantic")
        self.c.persuasions[r] = (cst, span)

    def stmt_handshake(self, kw: Token):
        r1, _ = self.triple()
        self.expect("~")
        r2, end = self.triple()
        span = kw.span.cover(end)
        self.c.triple_refs.append((r1, span, "handshake"))
        self.c.triple_refs.append((r2, span, "handshake"))
        self.c.handshakes.append((r1, r2, span))

    def when(self, end: SourceSpan):
        if not self.at("when"):
            return frozenset(), end
        self.advance()
        self.expect("[")
        cmps = [self.comparison()]
        while self.at(","):
            self.advance()
            cmps.append(self.comparison())
        close = self.expect("]")
        return frozenset(cmps), close.span

    def comparison(self) -> Comparison:
        lhs, _ = self.term()
        if self.at("<"):
            op = "<"
        elif self.at("=="):
            op = "=="
        else:
            self.error(f"expected '<' or '==', found {self.describe(self.tok)}")
        self.advance()
        rhs, _ = self.term()
        return Comparison(lhs, op, rhs)

    def term(self):
        t = self.tok
        if t.kind == "nat":
            value, span = self.nat()
            return Literal(value), span
        if self.at("$"):
            self.advance()
            if self.at("("):
                r, span = self.triple()
                if r.middle is None:
                    self.error("only conversions carry amounts", t.span.cover(span), "semantic")
                self.c.triple_refs.append((r, t.span.cover(span), "reference"))
                return TripleRef(r), t.span.cover(span)
            a = self.arg()
            return ArgRef(a.text), t.span.cover(a.span)
        self.error(f"expected a number, $argument or $(triple), found {self.describe(t)}")

    def triple(self) -> tuple[Triple, SourceSpan]:
        open_ = self.expect("(")
        src = self.arg()
        self.expect(",")
        if self.at("eps"):
            self.advance()
            mid = None
        else:
            mid = self.arg().text
        self.expect(",")
        tgt = self.arg()
        close = self.expect(")")
        return Triple(src.text, mid, tgt.text), open_.span.cover(close.span)


def _element_spans(c: _Collected) -> dict:
    spans: dict = {}
    for a, (_, span) in c.args.items():
        spans[a] = span
    for e, (_, _, span, _) in c.agents.items():
        spans.setdefault(e, span)
    for k, (_, span) in c.attacks.items():
        spans[k] = span
    for r, (_, span) in c.persuasions.items():
        spans[r] = span
    for a, (_, span) in c.qty.items():
        spans[("qty", a)] = span
    return spans


def parse(text: str | bytes) -> Framework:
    """Parse ``.napa`` source into a validated :class:`Framework`.

    Raises :class:`ParseError` carrying every diagnostic found.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError([Diagnostic(f"input is not UTF-8: {exc.reason}", _START, "lexical")]) from None
    if text.startswith("\ufeff"):
        text = text[1:]
    tokens, diags = tokenize(text)
    parser = _Parser(tokens)
    c = parser.parse()
    diags.extend(parser.diags)

    declared = set(c.args)
    for a, span in c.refs:
        if a not in declared:
            diags.append(Diagnostic(f"unknown argument {a}", span, "semantic"))
    for r, span, what in c.triple_refs:
        if r not in c.persuasions:
            diags.append(Diagnostic(f"{what} names undeclared persuasion {r}", span, "semantic"))
    if diags:
        raise ParseError(sorted(diags, key=lambda d: (d.span.line, d.span.col)))

    fw = Framework.build(
        c.args,
        attacks={k: v[0] for k, v in c.attacks.items()},
        persuasions={k: v[0] for k, v in c.persuasions.items()},
        scope={e: v[1] for e, v in c.agents.items()},
        semantics={e: v[0] for e, v in c.agents.items()},
        initial_visible=c.init[0] if c.init else (),
        handshake=[(r1, r2) for r1, r2, _ in c.handshakes],
        initial_quantities={a: v[0] for a, v in c.qty.items()},
        amounts=c.amounts,
        labels={a: v[0] for a, v in c.args.items() if v[0] is not None},
    )
    report = validate_framework(fw)
    if report:
        spans = _element_spans(c)
        out = []
        for v in report:
            el = v.element
            span = spans.get(("qty", el)) if v.code in ("visible-zero", "bad-quantity") else None
            span = span or spans.get(el) or (c.init[1] if c.init and v.code == "unknown-argument" else None) or _START
            if v.code == "empty-arguments":
                msg = "no arguments declared (at least one is required)"
            else:
                msg = v.message
            out.append(Diagnostic(msg, span, v.code))
        raise ParseError(out)
    return fw


def parse_file(path) -> Framework:
    with open(path, "rb") as fh:
        return parse(fh.read())


# -- serializer --------------------------------------------------------------


def _term(t) -> str:
    if isinstance(t, Literal):
        return str(t.value)
    if isinstance(t, ArgRef):
        return f"${t.arg}"
    return f"${_triple(t.triple)}"


def _triple(r: Triple) -> str:
    return f"({r.source},{'eps' if r.middle is None else r.middle},{r.target})"


def _when(cst) -> str:
    if not cst:
        return ""
    parts = ", ".join(f"{_term(c.lhs)} {c.op} {_term(c.rhs)}" for c in sorted(cst, key=constraint_key))
    return f" when [{parts}]"


def serialize(fw: Framework) -> str:
    """Canonical text form; ``parse(serialize(fw)) == fw``."""
    lines = []
    for e in sorted(fw.agents, key=arg_key):
        members = " ".join(sorted_args(fw.scope[e]))
        lines.append(f"agent {e} semantics {fw.semantics[e].value} {{ {members} }}")
    for a in sorted_args(fw.arguments):
        label = fw.labels.get(a)
        lines.append(f"arg {a}" + (f" {json.dumps(label, ensure_ascii=False)}" if label is not None else ""))
    init = " ".join(sorted_args(fw.initial_visible))
    lines.append(f"init {{ {init} }}" if init else "init { }")
    for a, n in fw.initial_quantities.items_sorted():
        lines.append(f"qty {a} = {n}")
    for a, b in sorted(fw.attacks, key=lambda k: (arg_key(k[0]), arg_key(k[1]))):
        lines.append(f"attack {a} -> {b}{_when(fw.attacks[(a, b)])}")
    pers = sorted(fw.persuasions, key=triple_key)
    for r in pers:
        if r.middle is None:
            lines.append(f"induce {r.source} => {r.target}{_when(fw.persuasions[r])}")
    for r in pers:
        if r.middle is not None:
            amount = f" amount {_term(fw.amounts[r])}" if r in fw.amounts else ""
            lines.append(f"convert {r.source} : {r.middle} => {r.target}{amount}{_when(fw.persuasions[r])}")
    pairs = set()
    for r, partners in fw.handshake.items():
        for p in partners:
            pairs.add(tuple(sorted((r, p), key=triple_key)))
    for r1, r2 in sorted(pairs, key=lambda pr: (triple_key(pr[0]), triple_key(pr[1]))):
        lines.append(f"handshake {_triple(r1)} ~ {_triple(r2)}")
    return "\n".join(lines) + "\n"

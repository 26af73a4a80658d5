"""Compiled-unit text format: a dated netlist enabling separate compilation.

Line-oriented UTF-8; `#` starts a comment.  Layout:

    .lec 1
    .model NAME
    .inputs S T ...
    .outputs O ...
    .latch WIRE INIT NEXTWIRE
    .eq WIRE EARLY LATE = EXPR
    .end

Expressions are infix over identifiers with `& | !`, parentheses and the
literals 0/1.  A status signal S appears as the wire pair S_def / S_val.
Writers are byte-deterministic: latches sorted by name, equations by
(early date, name).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .bexpr import (
    BAnd, BConst, BNot, BOr, BRef, BoolExpr, atoms, band, bnot, bor,
)
from .errors import LecError
from .lower import BooleanSystem, Latch
from .schedule import DateConsistencyError, Schedule, check_schedule

VERSION_LINE = ".lec 1"
RESERVED_INPUTS = ("_set", "_reset", "_kill")
RESERVED_OUTPUTS = ("_rtl",)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.$%]*")


@dataclass
class LecDocument:
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    system: BooleanSystem
    schedule: Schedule

    @property
    def user_inputs(self) -> tuple[str, ...]:
        return tuple(s for s in self.inputs if not s.startswith("_"))

    @property
    def user_outputs(self) -> tuple[str, ...]:
        return tuple(s for s in self.outputs if not s.startswith("_"))

    @property
    def is_open(self) -> bool:
        """Open units still expose their control pair as inputs."""
        return "_set" in self.inputs


def format_expr(e: BoolExpr, prec: int = 0) -> str:
    match e:
        case BConst(v):
            return "1" if v else "0"
        case BRef(w):
            return w
        case BNot(a):
            return "!" + format_expr(a, 3)
        case BAnd(args):
            text = " & ".join(format_expr(a, 2) for a in args)
            return f"({text})" if prec > 2 else text
        case BOr(args):
            text = " | ".join(format_expr(a, 1) for a in args)
            return f"({text})" if prec > 1 else text
    raise TypeError(e)


def write_lec(sys: BooleanSystem, sched: Schedule) -> str:
    lines = [VERSION_LINE, f".model {sys.name}"]
    if sys.inputs:
        lines.append(".inputs " + " ".join(sys.inputs))
    if sys.outputs:
        lines.append(".outputs " + " ".join(sys.outputs))
    for latch in sorted(sys.latches, key=lambda l: l.name):
        lines.append(f".latch {latch.name} {int(latch.init)} {latch.next_wire}")
    for wire in sorted(sys.equations, key=lambda w: (sched.early[w], w)):
        expr = format_expr(sys.equations[wire])
        lines.append(f".eq {wire} {sched.early[wire]} {sched.late[wire]} = {expr}")
    lines.append(".end")
    return "\n".join(lines) + "\n"


class _ExprParser:
    def __init__(self, text: str, line: int):
        self.tokens = self._tokenize(text, line)
        self.pos = 0
        self.line = line

    def _tokenize(self, text: str, line: int):
        tokens = []
        i = 0
        while i < len(text):
            c = text[i]
            if c.isspace():
                i += 1
                continue
            if c in "&|!()":
                tokens.append(c)
                i += 1
                continue
            if c in "01" and (i + 1 == len(text) or not _IDENT.match(text[i + 1])):
                tokens.append(("const", c == "1"))
                i += 1
                continue
            m = _IDENT.match(text, i)
            if not m:
                raise LecError(f"bad character {c!r} in expression", line)
            tokens.append(("ref", m.group()))
            i = m.end()
        return tokens

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> BoolExpr:
        e = self._or()
        if self.peek() is not None:
            raise LecError(f"trailing tokens in expression", self.line)
        return e

    def _or(self) -> BoolExpr:
        terms = [self._and()]
        while self.peek() == "|":
            self.take()
            terms.append(self._and())
        return bor(*terms) if len(terms) > 1 else terms[0]

    def _and(self) -> BoolExpr:
        terms = [self._unary()]
        while self.peek() == "&":
            self.take()
            terms.append(self._unary())
        return band(*terms) if len(terms) > 1 else terms[0]

    def _unary(self) -> BoolExpr:
        tok = self.take()
        if tok == "!":
            return bnot(self._unary())
        if tok == "(":
            e = self._or()
            if self.take() != ")":
                raise LecError("missing closing parenthesis", self.line)
            return e
        if isinstance(tok, tuple):
            kind, value = tok
            return BConst(value) if kind == "const" else BRef(value)
        raise LecError(f"unexpected token {tok!r} in expression", self.line)


def read_lec(text: str) -> LecDocument:
    lines = text.splitlines()
    if not lines or lines[0].strip() != VERSION_LINE:
        raise LecError("missing or unsupported version pragma", 1)
    name = None
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    latches: list[Latch] = []
    equations: dict[str, BoolExpr] = {}
    early: dict[str, int] = {}
    late: dict[str, int] = {}
    ended = False
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ended:
            raise LecError("content after .end", lineno)
        fields = line.split()
        directive = fields[0]
        if directive == ".model":
            if name is not None or len(fields) != 2:
                raise LecError("malformed .model", lineno)
            name = fields[1]
        elif directive == ".inputs":
            inputs = tuple(fields[1:])
        elif directive == ".outputs":
            outputs = tuple(fields[1:])
        elif directive == ".latch":
            if len(fields) != 4 or fields[2] not in ("0", "1"):
                raise LecError("malformed .latch", lineno)
            latches.append(Latch(fields[1], fields[2] == "1", fields[3]))
        elif directive == ".eq":
            if len(fields) < 6 or fields[4] != "=":
                raise LecError("malformed .eq", lineno)
            wire = fields[1]
            if wire in equations:
                raise LecError(f"wire {wire} defined twice", lineno)
            try:
                e_date, l_date = int(fields[2]), int(fields[3])
            except ValueError:
                raise LecError("dates must be integers", lineno)
            expr_text = line.split("=", 1)[1]
            equations[wire] = _ExprParser(expr_text, lineno).parse()
            early[wire], late[wire] = e_date, l_date
        elif directive == ".end":
            ended = True
        else:
            raise LecError(f"unknown directive {directive}", lineno)
    if name is None or not ended:
        raise LecError("missing .model or .end", None)

    sys = BooleanSystem(name, inputs, outputs, latches, equations)
    defined = set(equations)
    latch_names = sys.latch_names()
    allowed_free = sys.input_wires() | latch_names
    for wire, expr in equations.items():
        for a in atoms(expr):
            if a.wire not in defined and a.wire not in allowed_free:
                raise LecError(f"reference to undefined wire {a.wire} in {wire}", None)
    for latch in latches:
        if latch.next_wire not in defined and latch.next_wire not in allowed_free:
            raise LecError(f"latch {latch.name} next wire {latch.next_wire} undefined", None)
        if latch.name in defined:
            raise LecError(f"latch {latch.name} also defined by an equation", None)

    sched = Schedule(early, late)
    try:
        check_schedule(sys, sched)
    except DateConsistencyError as exc:
        raise LecError(f"date consistency: {exc}", None)
    return LecDocument(name, inputs, outputs, sys, sched)


def read_lec_file(path: str) -> LecDocument:
    with open(path, encoding="utf-8") as handle:
        return read_lec(handle.read())


def write_lec_file(path: str, sys: BooleanSystem, sched: Schedule) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(write_lec(sys, sched))

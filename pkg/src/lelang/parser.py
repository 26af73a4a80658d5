"""Lexer and recursive-descent parser for .le sources.

Deviations from the corpus listings are minimal: interface signal lists accept
comma or whitespace separation, `;;` starts a line comment, `present` branches
are a single simple statement or a braced block (so `>>` after an else binds
outside the conditional), and automaton transitions are `;`-terminated.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    Abort, And, AutoState, AutoTransition, Automaton, Body, Emit, Halt, Local,
    Loop, Module, Not, Nothing, Or, Par, Pause, Present, Program, Run, RunDecl,
    Seq, Sig, SigExpr, Statement, Wait,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'string', 'punct', 'eof'
    text: str
    line: int
    column: int


_PUNCT = ("->", ">>", "||", "{", "}", "[", "]", "(", ")", ":", ";", ",", "\\", "/")

KEYWORDS = {
    "module", "end", "Input", "Output", "Run",
    "present", "else", "loop", "wait", "emit", "abort", "when",
    "nothing", "pause", "halt", "local", "run",
    "automaton", "state", "final", "initial", "transition",
    "and", "or", "not",
}


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith(";;", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise ParseError("unterminated string", line, col)
            toks.append(Token("string", text[i + 1:j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(Token("punct", p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


class Parser:
    def __init__(self, text: str, source_file: str | None = None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.source_file = source_file

    # --- token plumbing ---------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.cur.line, self.cur.column)

    def at(self, text: str) -> bool:
        return self.cur.text == text and self.cur.kind in ("punct", "ident")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.cur.text!r}")
        tok = self.cur
        self.pos += 1
        return tok

    def ident(self, what: str = "identifier") -> str:
        if self.cur.kind != "ident" or self.cur.text in KEYWORDS:
            raise self.error(f"expected {what}, found {self.cur.text!r}")
        name = self.cur.text
        self.pos += 1
        return name

    # --- modules -----------------------------------------------------------

    def parse_program(self) -> Program:
        prog = Program()
        while not self.cur.kind == "eof":
            prog.modules.append(self.parse_module())
        if not prog.modules:
            raise self.error("no module in source")
        return prog

    def parse_module(self) -> Module:
        self.expect("module")
        name = self.ident("module name")
        self.expect(":")
        inputs = self._signal_section("Input")
        outputs = self._signal_section("Output")
        run_decls = self._run_decls()
        body = self.parse_body()
        self.expect("end")
        return Module(name, inputs, outputs, run_decls, body, self.source_file)

    def _signal_section(self, keyword: str) -> tuple[str, ...]:
        if not self.accept(keyword):
            return ()
        self.expect(":")
        names = [self.ident("signal name")]
        while self.accept(",") or (self.cur.kind == "ident" and self.cur.text not in KEYWORDS):
            names.append(self.ident("signal name"))
        self.expect(";")
        return tuple(names)

    def _run_decls(self) -> tuple[RunDecl, ...]:
        if not self.accept("Run"):
            return ()
        self.expect(":")
        decls = []
        while self.cur.kind == "string":
            path = self.cur.text
            self.pos += 1
            self.expect(":")
            decls.append(RunDecl(path, self.ident("module name")))
            self.accept(";")
        if not decls:
            raise self.error("expected at least one run declaration")
        return tuple(decls)

    # --- bodies ------------------------------------------------------------

    def parse_body(self) -> Body:
        if self.at("automaton"):
            return self.parse_automaton()
        return self.parse_statement()

    def parse_statement(self) -> Statement:
        return self._parallel()

    def _parallel(self) -> Statement:
        left = self._sequence()
        while self.accept("||"):
            left = Par(left, self._sequence())
        return left

    def _sequence(self) -> Statement:
        left = self._primary()
        while self.accept(">>"):
            left = Seq(left, self._primary())
        return left

    def _braced(self) -> Statement:
        self.expect("{")
        inner = self.parse_statement()
        self.expect("}")
        return inner

    def _branch(self) -> Statement:
        """A present branch: either a braced block or one primary statement."""
        if self.at("{"):
            return self._braced()
        return self._primary()

    def _primary(self) -> Statement:
        if self.at("{"):
            return self._braced()
        if self.accept("nothing"):
            return Nothing()
        if self.accept("halt"):
            return Halt()
        if self.accept("pause"):
            return Pause()
        if self.accept("emit"):
            return Emit(self.ident("signal name"))
        if self.accept("wait"):
            return Wait(self.ident("signal name"))
        if self.accept("present"):
            trigger = self.parse_sig_expr()
            then = self._branch()
            self.expect("else")
            orelse = self._branch()
            return Present(trigger, then, orelse)
        if self.accept("loop"):
            self.expect("{")
            body = self.parse_statement()
            self.expect("}")
            return Loop(body)
        if self.accept("abort"):
            self.expect("{")
            body = self.parse_statement()
            self.expect("}")
            self.expect("when")
            return Abort(body, self.ident("signal name"))
        if self.accept("local"):
            names = [self.ident("signal name")]
            while self.accept(",") or (self.cur.kind == "ident" and self.cur.text not in KEYWORDS):
                names.append(self.ident("signal name"))
            self.expect("{")
            body = self.parse_statement()
            self.expect("}")
            return Local(tuple(names), body)
        if self.accept("run"):
            return self._run_statement()
        raise self.error(f"expected a statement, found {self.cur.text!r}")

    def _run_statement(self) -> Run:
        module = self.ident("module name")
        renamings: list[tuple[str, str]] = []
        if self.accept("["):
            while not self.accept("]"):
                new = self.ident("signal name")
                self.expect("\\")
                formal = self.ident("signal name")
                renamings.append((new, formal))
                self.accept(",")
        return Run(module, tuple(renamings))

    # --- signal expressions --------------------------------------------------

    def parse_sig_expr(self) -> SigExpr:
        return self._or_expr()

    def _or_expr(self) -> SigExpr:
        left = self._and_expr()
        while self.accept("or"):
            left = Or(left, self._and_expr())
        return left

    def _and_expr(self) -> SigExpr:
        left = self._unary_expr()
        while self.accept("and"):
            left = And(left, self._unary_expr())
        return left

    def _unary_expr(self) -> SigExpr:
        if self.accept("not"):
            return Not(self._unary_expr())
        if self.accept("{"):
            inner = self._or_expr()
            self.expect("}")
            return inner
        return Sig(self.ident("signal name"))

    # --- automata ---------------------------------------------------------------

    def parse_automaton(self) -> Automaton:
        self.expect("automaton")
        states = []
        while self.at("state"):
            states.append(self._state())
        if not states:
            raise self.error("automaton needs at least one state")
        self.expect("transition")
        transitions = []
        while not self.at("end"):
            transitions.append(self._transition())
        return Automaton(tuple(states), tuple(transitions))

    def _state(self) -> AutoState:
        self.expect("state")
        name = self.ident("state name")
        final = self.accept("final")
        run = None
        if self.accept("run"):
            run = self._run_statement()
        action: list[str] = []
        if self.accept("/"):
            action.append(self.ident("signal name"))
            while self.accept(",") or (self.cur.kind == "ident" and self.cur.text not in KEYWORDS):
                action.append(self.ident("signal name"))
        self.expect(";")
        return AutoState(name, final, run, tuple(action))

    def _transition(self) -> AutoTransition:
        initial = self.accept("initial")
        source = None
        if not initial:
            source = self.ident("source state")
        trigger = None
        if not (self.at("/") or self.at("->")):
            trigger = self.parse_sig_expr()
        action: list[str] = []
        if self.accept("/"):
            action.append(self.ident("signal name"))
            while self.accept(",") or (self.cur.kind == "ident" and self.cur.text not in KEYWORDS):
                action.append(self.ident("signal name"))
        self.expect("->")
        target = self.ident("target state")
        self.expect(";")
        return AutoTransition(initial, source, trigger, tuple(action), target)


def parse_program(text: str, source_file: str | None = None) -> Program:
    return Parser(text, source_file).parse_program()


def parse_module(text: str, source_file: str | None = None) -> Module:
    """Parse a source containing exactly one module."""
    prog = parse_program(text, source_file)
    if len(prog.modules) != 1:
        raise ParseError(f"expected one module, found {len(prog.modules)}", 1, 1)
    return prog.modules[0]

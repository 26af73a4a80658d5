"""Surface syntax tree for LE modules.

A module body is either a statement tree or an automaton; the two never mix.
Statement nodes carry no source positions (the parser reports those in
diagnostics); renamings on run statements are (new, formal) pairs meaning
"caller signal `new` stands for callee interface signal `formal`".
"""

from __future__ import annotations

from dataclasses import dataclass, field


# --- signal expressions -------------------------------------------------------

@dataclass(frozen=True)
class SigExpr:
    pass


@dataclass(frozen=True)
class Sig(SigExpr):
    name: str


@dataclass(frozen=True)
class And(SigExpr):
    left: SigExpr
    right: SigExpr


@dataclass(frozen=True)
class Or(SigExpr):
    left: SigExpr
    right: SigExpr


@dataclass(frozen=True)
class Not(SigExpr):
    arg: SigExpr


def sig_names(e: SigExpr) -> set[str]:
    match e:
        case Sig(name):
            return {name}
        case And(l, r) | Or(l, r):
            return sig_names(l) | sig_names(r)
        case Not(a):
            return sig_names(a)
    raise TypeError(e)


# --- statements ---------------------------------------------------------------

@dataclass(frozen=True)
class Statement:
    pass


@dataclass(frozen=True)
class Nothing(Statement):
    pass


@dataclass(frozen=True)
class Halt(Statement):
    pass


@dataclass(frozen=True)
class Pause(Statement):
    pass


@dataclass(frozen=True)
class Emit(Statement):
    signal: str


@dataclass(frozen=True)
class Wait(Statement):
    signal: str


@dataclass(frozen=True)
class Present(Statement):
    trigger: SigExpr
    then: Statement
    orelse: Statement


@dataclass(frozen=True)
class Seq(Statement):
    first: Statement
    second: Statement


@dataclass(frozen=True)
class Par(Statement):
    left: Statement
    right: Statement


@dataclass(frozen=True)
class Abort(Statement):
    body: Statement
    signal: str


@dataclass(frozen=True)
class Loop(Statement):
    body: Statement


@dataclass(frozen=True)
class Local(Statement):
    signals: tuple[str, ...]
    body: Statement


@dataclass(frozen=True)
class Run(Statement):
    module: str
    renamings: tuple[tuple[str, str], ...] = ()  # (new, formal)


# --- automata -------------------------------------------------------------------

@dataclass(frozen=True)
class AutoState:
    name: str
    final: bool = False
    run: Run | None = None
    action: tuple[str, ...] = ()  # parsed but unsupported; checks reject non-empty


@dataclass(frozen=True)
class AutoTransition:
    initial: bool
    source: str | None
    trigger: SigExpr | None  # None means an always-true trigger
    action: tuple[str, ...]
    target: str


@dataclass(frozen=True)
class Automaton:
    states: tuple[AutoState, ...]
    transitions: tuple[AutoTransition, ...]

    def state(self, name: str) -> AutoState:
        for st in self.states:
            if st.name == name:
                return st
        raise KeyError(name)


Body = Statement | Automaton


# --- modules --------------------------------------------------------------------

@dataclass(frozen=True)
class RunDecl:
    path: str
    module: str


@dataclass
class Module:
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    run_decls: tuple[RunDecl, ...]
    body: Body
    source_file: str | None = None


@dataclass
class Program:
    """All modules parsed from one source file, in order."""
    modules: list[Module] = field(default_factory=list)

    def get(self, name: str) -> Module | None:
        for m in self.modules:
            if m.name == name:
                return m
        return None


# --- traversal helpers -----------------------------------------------------------

def substatements(s: Statement):
    """Direct children of a statement node."""
    match s:
        case Present(_, t, e):
            return (t, e)
        case Seq(a, b) | Par(a, b):
            return (a, b)
        case Abort(b, _) | Loop(b) | Local(_, b):
            return (b,)
        case _:
            return ()


def walk(s: Statement):
    yield s
    for c in substatements(s):
        yield from walk(c)


def emitted_signals(s: Statement) -> set[str]:
    """Signals directly emitted anywhere in the statement (run callees excluded)."""
    return {n.signal for n in walk(s) if isinstance(n, Emit)}


def tested_signals(s: Statement) -> set[str]:
    """Signals read by triggers (present expressions, wait, abort)."""
    out: set[str] = set()
    for n in walk(s):
        match n:
            case Present(trig, _, _):
                out |= sig_names(trig)
            case Wait(sig) | Abort(_, sig):
                out.add(sig)
    return out


def run_statements(s: Statement) -> list[Run]:
    return [n for n in walk(s) if isinstance(n, Run)]


def body_runs(body: Body) -> list[Run]:
    if isinstance(body, Automaton):
        return [st.run for st in body.states if st.run is not None]
    return run_statements(body)


def possibly_instantaneous(s: Statement) -> bool:
    """Conservative syntactic test: can the statement terminate in its start instant?

    Pause, wait, halt, run and loop never do; everything else may, depending on
    composition.  Loop bodies for which this returns True are rejected.
    """
    match s:
        case Nothing() | Emit(_):
            return True
        case Pause() | Wait(_) | Halt() | Run(_, _) | Loop(_):
            return False
        case Seq(a, b) | Par(a, b):
            return possibly_instantaneous(a) and possibly_instantaneous(b)
        case Present(_, t, e):
            return possibly_instantaneous(t) or possibly_instantaneous(e)
        case Abort(b, _) | Local(_, b):
            return possibly_instantaneous(b)
    raise TypeError(s)


# --- pretty printer ----------------------------------------------------------------

def sig_expr_text(e: SigExpr, prec: int = 0) -> str:
    match e:
        case Sig(name):
            return name
        case Not(a):
            return f"not {sig_expr_text(a, 3)}"
        case And(l, r):
            t = f"{sig_expr_text(l, 2)} and {sig_expr_text(r, 2)}"
            return "{" + t + "}" if prec > 2 else t
        case Or(l, r):
            t = f"{sig_expr_text(l, 1)} or {sig_expr_text(r, 1)}"
            return "{" + t + "}" if prec > 1 else t
    raise TypeError(e)


def statement_text(s: Statement) -> str:
    match s:
        case Nothing():
            return "nothing"
        case Halt():
            return "halt"
        case Pause():
            return "pause"
        case Emit(sig):
            return f"emit {sig}"
        case Wait(sig):
            return f"wait {sig}"
        case Present(trig, t, e):
            return (f"present {sig_expr_text(trig)} {{ {statement_text(t)} }}"
                    f" else {{ {statement_text(e)} }}")
        case Seq(a, b):
            return f"{{ {statement_text(a)} }} >> {{ {statement_text(b)} }}"
        case Par(a, b):
            return f"{{ {statement_text(a)} }} || {{ {statement_text(b)} }}"
        case Abort(b, sig):
            return f"abort {{ {statement_text(b)} }} when {sig}"
        case Loop(b):
            return f"loop {{ {statement_text(b)} }}"
        case Local(sigs, b):
            return f"local {', '.join(sigs)} {{ {statement_text(b)} }}"
        case Run(mod, renamings):
            if renamings:
                inner = " ".join(f"{new}\\{formal}" for new, formal in renamings)
                return f"run {mod} [{inner}]"
            return f"run {mod}"
    raise TypeError(s)


def automaton_text(a: Automaton) -> str:
    lines = ["automaton"]
    for st in a.states:
        parts = [f"state {st.name}"]
        if st.final:
            parts.append("final")
        if st.run is not None:
            parts.append(statement_text(st.run))
        if st.action:
            parts.append("/ " + " ".join(st.action))
        lines.append("  " + " ".join(parts) + ";")
    lines.append("  transition")
    for tr in a.transitions:
        parts = []
        if tr.initial:
            parts.append("initial")
        if tr.source is not None:
            parts.append(tr.source)
        if tr.trigger is not None:
            parts.append(sig_expr_text(tr.trigger))
        if tr.action:
            parts.append("/ " + " ".join(tr.action))
        parts.append(f"-> {tr.target}")
        lines.append("    " + " ".join(parts) + ";")
    return "\n".join(lines)


def module_text(m: Module) -> str:
    lines = [f"module {m.name}:"]
    if m.inputs:
        lines.append(f"Input: {', '.join(m.inputs)};")
    if m.outputs:
        lines.append(f"Output: {', '.join(m.outputs)};")
    if m.run_decls:
        lines.append("Run: " + "\n     ".join(f'"{d.path}" : {d.module};' for d in m.run_decls))
    if isinstance(m.body, Automaton):
        lines.append(automaton_text(m.body))
    else:
        lines.append(statement_text(m.body))
    lines.append("end")
    return "\n".join(lines) + "\n"


def program_text(p: Program) -> str:
    return "\n".join(module_text(m) for m in p.modules)

"""Static diagnostics for parsed modules.

Checks cover scope rules, the conservative loop-instantaneity rule, untestable
locals, and automaton well-formedness.  Diagnostics never raise; callers decide
whether warnings block.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ast import (
    Abort, Automaton, Emit, Local, Loop, Module, Present, Run, Sig, SigExpr,
    Statement, Wait, emitted_signals, possibly_instantaneous, sig_names,
    substatements, tested_signals, walk,
)

RESERVED_PREFIX = "_"
RESERVED_NAMES = {"tick"}


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # 'error' | 'warning'
    message: str
    module: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.module}: {self.message}"


def errors(diags: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]


class CalleeInterfaces:
    """Interface lookup for run callees, filled in by resolution."""

    def __init__(self, table: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] | None = None):
        self.table = table or {}

    def outputs_bound(self, run: Run) -> set[str] | None:
        """Caller-side names driven by the callee's outputs, or None if unknown."""
        entry = self.table.get(run.module)
        if entry is None:
            return None
        _, outs = entry
        rename = {formal: new for new, formal in run.renamings}
        return {rename.get(o, o) for o in outs}

    def interface(self, name: str) -> tuple[tuple[str, ...], tuple[str, ...]] | None:
        return self.table.get(name)


def check_static(m: Module, callees: CalleeInterfaces | None = None) -> list[Diagnostic]:
    callees = callees or CalleeInterfaces()
    diags: list[Diagnostic] = []

    def err(msg: str):
        diags.append(Diagnostic("error", msg, m.name))

    def warn(msg: str):
        diags.append(Diagnostic("warning", msg, m.name))

    # interface sanity
    declared = list(m.inputs) + list(m.outputs)
    for name, group in itertools.groupby(sorted(declared)):
        if len(list(group)) > 1:
            err(f"signal {name!r} declared more than once in the interface")
    for name in declared:
        if name.startswith(RESERVED_PREFIX) or name in RESERVED_NAMES:
            err(f"signal name {name!r} is reserved")

    if isinstance(m.body, Automaton):
        _check_automaton(m, m.body, err, warn)
        return diags

    _check_scopes(m, m.body, set(declared), err)
    _check_statements(m, m.body, callees, err, warn)
    return diags


def _check_scopes(m: Module, s: Statement, scope: set[str], err) -> None:
    match s:
        case Local(names, body):
            for name in names:
                if name.startswith(RESERVED_PREFIX) or name in RESERVED_NAMES:
                    err(f"local signal name {name!r} is reserved")
                if name in scope:
                    err(f"local {name!r} shadows a signal already in scope")
            _check_scopes(m, body, scope | set(names), err)
            return
        case Emit(sig) | Wait(sig) | Abort(_, sig):
            if sig not in scope:
                err(f"signal {sig!r} is not declared in scope")
        case Present(trig, _, _):
            for name in sig_names(trig):
                if name not in scope:
                    err(f"signal {name!r} is not declared in scope")
        case Run(_, renamings):
            for new, _formal in renamings:
                if new not in scope:
                    err(f"renaming target {new!r} is not declared in scope")
    for child in substatements(s):
        _check_scopes(m, child, scope, err)


def _check_statements(m: Module, body: Statement, callees: CalleeInterfaces, err, warn) -> None:
    for node in walk(body):
        match node:
            case Loop(inner):
                if possibly_instantaneous(inner):
                    err("instantaneous loop body")
            case Local(names, inner):
                emitted = emitted_signals(inner)
                unknown_callee = False
                for run in (n for n in walk(inner) if isinstance(n, Run)):
                    bound = callees.outputs_bound(run)
                    if bound is None:
                        unknown_callee = True
                    else:
                        emitted |= bound
                tested = tested_signals(inner)
                for name in names:
                    if name in tested and name not in emitted and not unknown_callee:
                        warn(f"local {name!r} is tested but never emitted")
            case Run(name, renamings):
                iface = callees.interface(name)
                if iface is not None:
                    formals = set(iface[0]) | set(iface[1])
                    for _new, formal in renamings:
                        if formal not in formals:
                            err(f"renaming references unknown formal signal {formal!r} of {name}")
                    seen = [f for _, f in renamings]
                    for f, group in itertools.groupby(sorted(seen)):
                        if len(list(group)) > 1:
                            err(f"formal signal {f!r} renamed twice in run {name}")


def _trigger_leaves(trig: SigExpr | None) -> set[str]:
    return sig_names(trig) if trig is not None else set()


def _trigger_eval(trig: SigExpr | None, valuation: dict[str, bool]) -> bool:
    from .ast import And, Not, Or
    if trig is None:
        return True
    match trig:
        case Sig(name):
            return valuation[name]
        case And(l, r):
            return _trigger_eval(l, valuation) and _trigger_eval(r, valuation)
        case Or(l, r):
            return _trigger_eval(l, valuation) or _trigger_eval(r, valuation)
        case Not(a):
            return not _trigger_eval(a, valuation)
    raise TypeError(trig)


def _check_automaton(m: Module, a: Automaton, err, warn) -> None:
    names = [st.name for st in a.states]
    if len(set(names)) != len(names):
        err("duplicate state names in automaton")
    finals = [st.name for st in a.states if st.final]
    if len(finals) != 1:
        err(f"automaton must have exactly one final state, found {len(finals)}")
    for st in a.states:
        if st.action:
            err(f"state {st.name!r} carries an action list, which is unsupported")
    known = set(names)
    initials = [t for t in a.transitions if t.initial]
    if not initials:
        warn("automaton has no initial transition and can never start")
    for t in a.transitions:
        if t.source is not None and t.source not in known:
            err(f"transition source {t.source!r} is not a state")
        if t.target not in known:
            err(f"transition target {t.target!r} is not a state")
    # determinism: outgoing triggers of one state must be pairwise unsatisfiable
    by_source: dict[str | None, list] = {}
    for t in a.transitions:
        by_source.setdefault(t.source if not t.initial else None, []).append(t)
    for source, group in by_source.items():
        for t1, t2 in itertools.combinations(group, 2):
            leaves = sorted(_trigger_leaves(t1.trigger) | _trigger_leaves(t2.trigger))
            if len(leaves) > 16:
                warn("trigger determinism check skipped: too many signals")
                continue
            for bits in itertools.product((False, True), repeat=len(leaves)):
                val = dict(zip(leaves, bits))
                if _trigger_eval(t1.trigger, val) and _trigger_eval(t2.trigger, val):
                    where = "initial transitions" if source is None else f"state {source!r}"
                    err(f"nondeterministic automaton: overlapping triggers from {where}")
                    break
    # final states with departures interact badly with termination; flag them
    final = finals[0] if len(finals) == 1 else None
    if final is not None and any(t.source == final for t in a.transitions):
        warn(f"final state {final!r} has outgoing transitions; termination wins only if none fires")

"""Term-rewriting reference interpreter.

Module bodies translate to process terms; one reaction is computed as the
least fixpoint of monotone refinement rounds over the signal environment.
Each reaction yields an output environment, a termination bit that is
sustained until the surrounding context consumes it, and the residual term.

This path values transparency over speed and serves as the oracle against
which the circuit translation is tested.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .ast import (
    Abort, And, AutoTransition, Automaton, Body, Emit, Halt, Local, Loop,
    Module, Not, Nothing, Or, Par, Pause, Present, Run, Seq, Sig, SigExpr,
    Statement, Wait,
)
from .resolve import CompiledCallee, ResolvedModule
from .xi import (
    BOT, ONE, TOP, ZERO, Environment, InternalFault, Xi,
    env_join, env_top, xi_join, xi_meet, xi_not,
)

TICK = "tick"


# --- process terms -------------------------------------------------------------

@dataclass(frozen=True)
class PleTerm:
    pass


@dataclass(frozen=True)
class PNothing(PleTerm):
    pass


@dataclass(frozen=True)
class PHalt(PleTerm):
    pass


@dataclass(frozen=True)
class PEmit(PleTerm):
    signal: str


@dataclass(frozen=True)
class PWait(PleTerm):
    signal: str


@dataclass(frozen=True)
class PIWait(PleTerm):
    signal: str


@dataclass(frozen=True)
class PPresent(PleTerm):
    trigger: SigExpr
    then: PleTerm
    orelse: PleTerm


@dataclass(frozen=True)
class PPar(PleTerm):
    left: PleTerm
    right: PleTerm


@dataclass(frozen=True)
class PSeq(PleTerm):
    first: PleTerm
    second: PleTerm


@dataclass(frozen=True)
class PAbort(PleTerm):
    body: PleTerm
    signal: str


@dataclass(frozen=True)
class PStar(PleTerm):
    body: PleTerm


@dataclass(frozen=True)
class PLocal(PleTerm):
    signal: str
    body: PleTerm


@dataclass(frozen=True)
class SemState:
    """One macro state: its name, finality, and the term it hosts."""
    name: str
    final: bool
    inner: PleTerm  # what the state runs once entered (nothing for plain states)


@dataclass(frozen=True)
class SemAutomaton:
    states: tuple[SemState, ...]
    transitions: tuple[AutoTransition, ...]  # triggers already renamed

    def state(self, name: str) -> SemState:
        for st in self.states:
            if st.name == name:
                return st
        raise KeyError(name)


@dataclass(frozen=True)
class PAuto(PleTerm):
    auto: SemAutomaton


@dataclass(frozen=True)
class PStateWait(PleTerm):
    """A freshly entered macro state: consumes one instant, then runs inner."""
    inner: PleTerm


@dataclass(frozen=True)
class PInState(PleTerm):
    auto: SemAutomaton
    state: str
    term: PleTerm


# --- translation -----------------------------------------------------------------

class _Fresh:
    def __init__(self):
        self.counter = itertools.count(1)

    def rename(self, name: str) -> str:
        return f"{name}#{next(self.counter)}"


def _subst_expr(e: SigExpr, subst: dict[str, str]) -> SigExpr:
    match e:
        case Sig(name):
            return Sig(subst.get(name, name))
        case And(l, r):
            return And(_subst_expr(l, subst), _subst_expr(r, subst))
        case Or(l, r):
            return Or(_subst_expr(l, subst), _subst_expr(r, subst))
        case Not(a):
            return Not(_subst_expr(a, subst))
    raise TypeError(e)


@dataclass
class Translation:
    term: PleTerm
    locals: set[str] = field(default_factory=set)
    signals: set[str] = field(default_factory=set)


def translate(resolved: ResolvedModule) -> Translation:
    """Build the process term of a resolved module, callees inlined.

    Run statements become `wait tick >> <callee body>`, with the callee's
    interface renamed to the caller's names and its locals made fresh.
    """
    out = Translation(PNothing())
    fresh = _Fresh()
    out.term = _gamma_body(resolved.module.body, {}, resolved, fresh, out)
    out.signals |= set(resolved.module.inputs) | set(resolved.module.outputs)
    return out


def _gamma_body(body: Body, subst: dict[str, str], resolved: ResolvedModule,
                fresh: _Fresh, out: Translation) -> PleTerm:
    if isinstance(body, Automaton):
        return _gamma_automaton(body, subst, resolved, fresh, out)
    return _gamma(body, subst, resolved, fresh, out)


def _gamma(s: Statement, subst: dict[str, str], resolved: ResolvedModule,
           fresh: _Fresh, out: Translation) -> PleTerm:
    def name(n: str) -> str:
        n2 = subst.get(n, n)
        out.signals.add(n2)
        return n2

    match s:
        case Nothing():
            return PNothing()
        case Halt():
            return PHalt()
        case Pause():
            # the calculus has no pause of its own; one-instant delay via the clock
            return PWait(TICK)
        case Emit(sig):
            return PEmit(name(sig))
        case Wait(sig):
            return PWait(name(sig))
        case Present(trig, then, orelse):
            te = _subst_expr(trig, subst)
            for leaf in _expr_names(te):
                out.signals.add(leaf)
            return PPresent(te, _gamma(then, subst, resolved, fresh, out),
                            _gamma(orelse, subst, resolved, fresh, out))
        case Seq(a, b):
            return PSeq(_gamma(a, subst, resolved, fresh, out),
                        _gamma(b, subst, resolved, fresh, out))
        case Par(a, b):
            return PPar(_gamma(a, subst, resolved, fresh, out),
                        _gamma(b, subst, resolved, fresh, out))
        case Abort(body, sig):
            return PAbort(_gamma(body, subst, resolved, fresh, out), name(sig))
        case Loop(body):
            return PStar(_gamma(body, subst, resolved, fresh, out))
        case Local(names, body):
            inner_subst = dict(subst)
            fresh_names = []
            for n in names:
                fn = fresh.rename(n)
                inner_subst[n] = fn
                out.locals.add(fn)
                out.signals.add(fn)
                fresh_names.append(fn)
            term = _gamma(body, inner_subst, resolved, fresh, out)
            for fn in reversed(fresh_names):
                term = PLocal(fn, term)
            return term
        case Run(module, renamings):
            return PSeq(PWait(TICK), _gamma_callee(module, renamings, subst,
                                                   resolved, fresh, out))
    raise TypeError(s)


def _gamma_callee(module: str, renamings, subst: dict[str, str],
                  resolved: ResolvedModule, fresh: _Fresh, out: Translation) -> PleTerm:
    callee = resolved.callees[module]
    if isinstance(callee, CompiledCallee):
        raise InternalFault(
            f"cannot interpret {module}: only compiled code is available")
    rename = {formal: subst.get(new, new) for new, formal in renamings}
    inner_subst = dict(rename)
    for sig in itertools.chain(callee.module.inputs, callee.module.outputs):
        inner_subst.setdefault(sig, subst.get(sig, sig))
    return _gamma_body(callee.module.body, inner_subst, callee, fresh, out)


def _gamma_automaton(a: Automaton, subst: dict[str, str], resolved: ResolvedModule,
                     fresh: _Fresh, out: Translation) -> PleTerm:
    states = []
    for st in a.states:
        inner: PleTerm = PNothing()
        if st.run is not None:
            inner = PSeq(PWait(TICK), _gamma_callee(st.run.module, st.run.renamings,
                                                    subst, resolved, fresh, out))
        states.append(SemState(st.name, st.final, inner))
    transitions = []
    for tr in a.transitions:
        trig = _subst_expr(tr.trigger, subst) if tr.trigger is not None else None
        if trig is not None:
            for leaf in _expr_names(trig):
                out.signals.add(leaf)
        action = tuple(subst.get(s, s) for s in tr.action)
        for s in action:
            out.signals.add(s)
        transitions.append(AutoTransition(tr.initial, tr.source, trig, action, tr.target))
    return PAuto(SemAutomaton(tuple(states), tuple(transitions)))


def _expr_names(e: SigExpr) -> set[str]:
    from .ast import sig_names
    return sig_names(e)


# --- one reaction ------------------------------------------------------------------

@dataclass
class Reaction:
    out: Environment
    term: bool
    next: PleTerm
    error: bool = False


def eval_sig_expr(e: SigExpr | None, env: Environment) -> Xi:
    """Trigger value: three-valued boolean connectives over signal statuses.

    The status join/meet are unsuitable here (present join absent is the
    contradiction, absent meet present the unknown); conditions are boolean
    combinations of statuses, undecided only while an operand that matters is.
    """
    from .xi import xi_kleene_and, xi_kleene_not, xi_kleene_or
    if e is None:
        return ONE
    match e:
        case Sig(name):
            return env.get(name, BOT)
        case And(l, r):
            return xi_kleene_and(eval_sig_expr(l, env), eval_sig_expr(r, env))
        case Or(l, r):
            return xi_kleene_or(eval_sig_expr(l, env), eval_sig_expr(r, env))
        case Not(a):
            return xi_kleene_not(eval_sig_expr(a, env))
    raise TypeError(e)


def _cond_holds(trigger: SigExpr | None, env: Environment) -> bool:
    return eval_sig_expr(trigger, env) == ONE


def _derive(p: PleTerm, env: Environment) -> tuple[Environment, bool, PleTerm]:
    match p:
        case PNothing():
            return env, True, PNothing()
        case PHalt():
            # ready-to-leave never rises; the residual stays halt
            return env, False, PHalt()
        case PEmit(s):
            out = dict(env)
            out[s] = xi_join(out.get(s, BOT), ONE)
            return out, True, PNothing()
        case PWait(s):
            return env, False, PIWait(s)
        case PIWait(s):
            if env.get(s, BOT) == ONE:
                return env, True, PNothing()
            return env, False, p
        case PPresent(trig, then, orelse):
            v = eval_sig_expr(trig, env)
            if v == ONE:
                return _derive(then, env)
            if v == ZERO:
                return _derive(orelse, env)
            if v == BOT:
                return env, False, p
            return env_top(env), True, p  # contradictory trigger poisons everything
        case PPar(a, b):
            ea, ta, na = _derive(a, env)
            eb, tb, nb = _derive(b, env)
            out = env_join(ea, eb)
            if ta and tb:
                return out, True, PNothing()
            return out, False, PPar(na, nb)
        case PSeq(a, b):
            ea, ta, na = _derive(a, env)
            if not ta:
                return ea, False, PSeq(na, b)
            return _derive(b, ea)
        case PAbort(body, s):
            eb, tb, nb = _derive(body, env)
            if env.get(s, BOT) == ONE:
                return eb, True, PNothing()
            if tb:
                return eb, True, PNothing()
            return eb, False, PAbort(nb, s)
        case PStar(body):
            eb, tb, nb = _derive(body, env)
            if tb:
                raise InternalFault("loop body terminated instantaneously")
            return eb, False, PSeq(nb, p)
        case PLocal(s, body):
            inner = env if s in env else {**env, s: BOT}
            eb, tb, nb = _derive(body, inner)
            if tb:
                return eb, True, PNothing()
            return eb, False, PLocal(s, nb)
        case PStateWait(inner):
            return env, False, inner
        case PAuto(auto):
            for tr in auto.transitions:
                if tr.initial and _cond_holds(tr.trigger, env):
                    out = dict(env)
                    for s in tr.action:
                        out[s] = xi_join(out.get(s, BOT), ONE)
                    target = auto.state(tr.target)
                    return out, False, PInState(auto, target.name, PStateWait(target.inner))
            return env, False, p
        case PInState(auto, state, term):
            for tr in auto.transitions:
                if not tr.initial and tr.source == state and _cond_holds(tr.trigger, env):
                    out = dict(env)
                    for s in tr.action:
                        out[s] = xi_join(out.get(s, BOT), ONE)
                    target = auto.state(tr.target)
                    return out, False, PInState(auto, target.name, PStateWait(target.inner))
            et, tt, nt = _derive(term, env)
            if auto.state(state).final and tt:
                return et, True, PNothing()
            return et, False, PInState(auto, state, nt)
    raise TypeError(p)


def _may_terminate(p: PleTerm, env: Environment) -> bool:
    """Could the term's termination bit still rise this instant?  Conservative."""
    match p:
        case PNothing() | PEmit(_):
            return True
        case PHalt() | PWait(_) | PStar(_) | PStateWait(_) | PAuto(_):
            return False
        case PIWait(s):
            return env.get(s, BOT) in (ONE, BOT)
        case PPresent(trig, a, b):
            v = eval_sig_expr(trig, env)
            if v == ONE:
                return _may_terminate(a, env)
            if v == ZERO:
                return _may_terminate(b, env)
            if v == TOP:
                return True
            return _may_terminate(a, env) or _may_terminate(b, env)
        case PPar(a, b) | PSeq(a, b):
            return _may_terminate(a, env) and _may_terminate(b, env)
        case PAbort(a, s):
            return env.get(s, BOT) in (ONE, BOT) or _may_terminate(a, env)
        case PLocal(_, a):
            return _may_terminate(a, env)
        case PInState(auto, state, t):
            return auto.state(state).final and _may_terminate(t, env)
    raise TypeError(p)


def _can_emit(p: PleTerm, env: Environment, out: set[str]) -> None:
    """Signals the term might still emit this instant, given current knowledge."""
    match p:
        case PNothing() | PHalt() | PWait(_) | PIWait(_) | PStateWait(_):
            return
        case PEmit(s):
            out.add(s)
        case PPresent(trig, a, b):
            v = eval_sig_expr(trig, env)
            if v == ONE:
                _can_emit(a, env, out)
            elif v == ZERO:
                _can_emit(b, env, out)
            else:
                _can_emit(a, env, out)
                _can_emit(b, env, out)
        case PPar(a, b):
            _can_emit(a, env, out)
            _can_emit(b, env, out)
        case PSeq(a, b):
            _can_emit(a, env, out)
            if _may_terminate(a, env):
                _can_emit(b, env, out)
        case PAbort(a, _):
            _can_emit(a, env, out)
        case PStar(a):
            _can_emit(a, env, out)
        case PLocal(_, a):
            _can_emit(a, env, out)
        case PAuto(auto):
            for tr in auto.transitions:
                if tr.initial and eval_sig_expr(tr.trigger, env) in (ONE, BOT, TOP):
                    out.update(tr.action)
        case PInState(auto, state, t):
            for tr in auto.transitions:
                if not tr.initial and tr.source == state and \
                        eval_sig_expr(tr.trigger, env) in (ONE, BOT, TOP):
                    out.update(tr.action)
            _can_emit(t, env, out)
        case _:
            raise TypeError(p)


def react(p: PleTerm, inputs: Environment, universe: set[str] | None = None,
          locals_: set[str] | None = None,
          environmental: set[str] | None = None) -> Reaction:
    """Compute one reaction: refine the environment until nothing changes.

    Refinement is the join of each derivation's emissions into the working
    environment.  At each convergence, a still-unknown non-input signal that
    no reachable emitter can still set becomes absent (fact propagation, not
    speculation), and refinement resumes.  Input statuses are never decided
    here.
    """
    universe = set(universe or ()) | set(inputs) | _term_signals(p) | {TICK}
    env: Environment = {s: BOT for s in sorted(universe)}
    env.update(inputs)
    env[TICK] = ONE
    protected = set(inputs) | (environmental or set()) | {TICK}
    limit = 3 * len(universe) + 6
    for _ in range(limit):
        out, term, nxt = _derive(p, env)
        merged = env_join(env, out)
        if merged == env:
            emittable: set[str] = set()
            _can_emit(p, env, emittable)
            undecided = [s for s, v in env.items()
                         if v == BOT and s not in protected and s not in emittable]
            if undecided:
                for s in undecided:
                    env[s] = ZERO
                continue
            hidden = locals_ or set()
            visible = {s: v for s, v in env.items() if s not in hidden and s != TICK}
            return Reaction(visible, term, nxt, error=TOP in env.values())
        env = merged
    raise InternalFault("reaction did not converge; monotonicity violated")


def run_trace(p: PleTerm, input_sequence: list[Environment],
              universe: set[str] | None = None,
              locals_: set[str] | None = None,
              environmental: set[str] | None = None) -> list[Reaction]:
    """Fold react over the instants, threading residual terms."""
    reactions: list[Reaction] = []
    term = p
    for inputs in input_sequence:
        r = react(term, inputs, universe, locals_, environmental)
        reactions.append(r)
        term = r.next
        if r.error or (r.term and r.next == PNothing()):
            break
    return reactions


def _term_signals(p: PleTerm) -> set[str]:
    out: set[str] = set()

    def visit(t: PleTerm):
        match t:
            case PEmit(s) | PWait(s) | PIWait(s):
                out.add(s)
            case PPresent(trig, a, b):
                out.update(_expr_names(trig))
                visit(a)
                visit(b)
            case PPar(a, b) | PSeq(a, b):
                visit(a)
                visit(b)
            case PAbort(a, s):
                out.add(s)
                visit(a)
            case PStar(a):
                visit(a)
            case PLocal(s, a):
                out.add(s)
                visit(a)
            case PStateWait(a):
                visit(a)
            case PAuto(auto):
                visit_auto(auto)
            case PInState(auto, _, t2):
                visit_auto(auto)
                visit(t2)
            case _:
                pass

    def visit_auto(auto: SemAutomaton):
        for st in auto.states:
            visit(st.inner)
        for tr in auto.transitions:
            if tr.trigger is not None:
                out.update(_expr_names(tr.trigger))
            out.update(tr.action)

    visit(p)
    return out


class Interpreter:
    """Convenience wrapper: reactions of a resolved module by instants."""

    def __init__(self, resolved: ResolvedModule):
        self.resolved = resolved
        self.translation = translate(resolved)
        self.inputs = resolved.module.inputs
        self.outputs = resolved.module.outputs
        self.reset()

    def reset(self) -> None:
        self.term: PleTerm = self.translation.term
        self.finished = False

    def react(self, inputs: Environment) -> Reaction:
        r = react(self.term, inputs, self.translation.signals,
                  self.translation.locals, environmental=set(self.inputs))
        self.term = r.next
        if r.error or (r.term and r.next == PNothing()):
            self.finished = True
        return r

    def trace(self, input_sequence: list[Environment]) -> list[Reaction]:
        return run_trace(self.translation.term, input_sequence,
                         self.translation.signals, self.translation.locals,
                         environmental=set(self.inputs))

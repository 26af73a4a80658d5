"""Status-valued circuits and the translation of statements onto them.

Every statement owns three synchronization wires (control in, reinit, ready to
leave) and possibly an activity register.  Signals compile to one canonical
read wire per name: a join of the signal's seed (the input pair, or unknown)
with one contribution per emitting site, each gated by the site's control.
Module outputs additionally get a reporting wire that decides absence once
every emitting site is decided, and that lifts to the error status when a
conditional test observes a contradictory trigger.

Synchronization wires carry decided/value boolean pairs.  Their combinations
use three-valued or/and over those pairs rather than the raw status join:
joining two decided control values with the status tables would fabricate a
contradiction (present join absent) out of mutually exclusive control paths,
which the agreement tests against the reference interpreter reject.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .ast import (
    Abort, And, AutoTransition, Automaton, Body, Emit, Halt, Local, Loop,
    Not, Nothing, Or, Par, Pause, Present, Run, Seq, Sig, SigExpr, Statement,
    Wait,
)
from .bexpr import (
    FALSE, TRUE, BConst, BoolExpr, BProj, band, bnot, bor, eval_bool,
)
from .errors import CausalityCycle
from .resolve import CompiledCallee, ResolvedModule
from .xi import (
    BOT, ONE, TOP, ZERO, InternalFault, Xi, decode, encode, of_bool,
    xi_cond, xi_gate, xi_join, xi_meet, xi_not,
)

RESERVED_SET = "_set"
RESERVED_RESET = "_reset"
RESERVED_KILL = "_kill"
RESERVED_RTL = "_rtl"


# --- expression nodes -----------------------------------------------------------

class XiExpr:
    __slots__ = ()


@dataclass(frozen=True)
class XConst(XiExpr):
    value: Xi


@dataclass(frozen=True)
class XInput(XiExpr):
    """The free def/val pair of an interface input signal."""
    signal: str


@dataclass(frozen=True)
class XWire(XiExpr):
    wire: str


@dataclass(frozen=True)
class XReg(XiExpr):
    reg: str


@dataclass(frozen=True)
class XJoin(XiExpr):
    left: XiExpr
    right: XiExpr


@dataclass(frozen=True)
class XMeet(XiExpr):
    left: XiExpr
    right: XiExpr


@dataclass(frozen=True)
class XNot(XiExpr):
    arg: XiExpr


@dataclass(frozen=True)
class XCond(XiExpr):
    arg: XiExpr
    cond: BoolExpr


@dataclass(frozen=True)
class XGate(XiExpr):
    arg: XiExpr
    sync: XiExpr


@dataclass(frozen=True)
class XOfBool(XiExpr):
    value: BoolExpr


@dataclass(frozen=True)
class XPair(XiExpr):
    """Independent decided/value projections; of_bool with a free decided bit."""
    dbit: BoolExpr
    vbit: BoolExpr


@dataclass
class Register:
    name: str
    init: bool
    next: XiExpr


@dataclass
class Socket:
    """A run site whose callee exists only as a compiled unit.

    The callee system is spliced in after lowering; until then the circuit
    refers to the instance's ready-to-leave pair and per-output contribution
    pairs through reserved wire names carrying the instance prefix.
    """
    prefix: str
    callee: CompiledCallee
    # callee interface signal -> canonical caller signal name
    binding: dict[str, str]
    set_wire: str
    reset_wire: str  # weak rank: restarts re-arm through it
    kill_wire: str   # strong rank: preemption, nothing survives it


@dataclass
class Circuit:
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    locals: tuple[str, ...] = ()
    wires: dict[str, XiExpr | None] = field(default_factory=dict)
    registers: list[Register] = field(default_factory=list)
    sockets: list[Socket] = field(default_factory=list)
    set_wire: str = RESERVED_SET
    reset_wire: str = RESERVED_RESET
    rtl_wire: str = RESERVED_RTL
    err_wire: str = "err$all"

    def read_wire(self, signal: str) -> str:
        return f"{signal}$cur"

    def rep_wire(self, signal: str) -> str:
        return signal

    def register_names(self) -> list[str]:
        return [r.name for r in self.registers]


def pair_of(wire: str) -> tuple[BoolExpr, BoolExpr]:
    return BProj("def", wire), BProj("val", wire)


def reg_pair(reg: str) -> tuple[BoolExpr, BoolExpr]:
    return TRUE, BProj("val", reg, is_reg=True)


def kor_pairs(*pairs: tuple[BoolExpr, BoolExpr]) -> tuple[BoolExpr, BoolExpr]:
    """Three-valued or: decided when some input is a decided 1 or all are decided 0."""
    v = bor(*(p[1] for p in pairs))
    decided = bor(
        bor(*(band(p[0], p[1]) for p in pairs)),
        band(*(band(p[0], bnot(p[1])) for p in pairs)),
    )
    return decided, v


def kand_pairs(*pairs: tuple[BoolExpr, BoolExpr]) -> tuple[BoolExpr, BoolExpr]:
    v = band(*(p[1] for p in pairs))
    decided = bor(
        bor(*(band(p[0], bnot(p[1])) for p in pairs)),
        band(*(band(p[0], p[1]) for p in pairs)),
    )
    return decided, v


@dataclass
class _Slot:
    kind: str  # 'input' | 'output' | 'local'
    name: str  # canonical name
    contribs: list[tuple[BoolExpr, BoolExpr]] = field(default_factory=list)
    # spliced-callee contributions: (read-pair wire, report-pair wire)
    foreign: list[tuple[str, str]] = field(default_factory=list)


class _Scope:
    """Name resolution plus per-signal contribution accumulators."""

    def __init__(self, builder: "Builder"):
        self.builder = builder
        self.slots: dict[str, _Slot] = {}
        self.frames: list[dict[str, str]] = [{}]

    def declare(self, name: str, kind: str, canonical: str | None = None) -> str:
        canonical = canonical or name
        self.slots[canonical] = _Slot(kind, canonical)
        self.frames[-1][name] = canonical
        self.builder.declare_wire(f"{canonical}$cur")
        return canonical

    def push(self) -> None:
        self.frames.append({})

    def pop(self) -> None:
        self.frames.pop()

    def canonical(self, name: str) -> str:
        for frame in reversed(self.frames):
            if name in frame:
                return frame[name]
        raise InternalFault(f"signal {name!r} escaped the static checks")

    def slot(self, name: str) -> _Slot:
        return self.slots[self.canonical(name)]

    def read(self, name: str) -> str:
        return f"{self.canonical(name)}$cur"


class Builder:
    def __init__(self, module_name: str):
        self.module_name = module_name
        self.circuit = Circuit(module_name, (), ())
        self.counter = itertools.count(0)
        self.local_counter = itertools.count(1)
        self.instance_counter = itertools.count(1)
        self.err_sites: list[BoolExpr] = []

    # --- wire plumbing -----------------------------------------------------

    def declare_wire(self, name: str) -> str:
        self.circuit.wires.setdefault(name, None)
        return name

    def define(self, name: str, expr: XiExpr) -> str:
        if self.circuit.wires.get(name) is not None:
            raise InternalFault(f"wire {name} defined twice")
        self.circuit.wires[name] = expr
        return name

    def node(self) -> str:
        return f"n{next(self.counter)}"

    def add_register(self, name: str, next_expr: XiExpr, init: bool = False) -> str:
        self.circuit.registers.append(Register(name, init, next_expr))
        return name

    def pair_wire(self, name: str, pair: tuple[BoolExpr, BoolExpr]) -> str:
        return self.define(name, XPair(pair[0], pair[1]))


def _sig_expr_wire(b: Builder, scope: _Scope, e: SigExpr, at: str) -> str:
    """Materialize a trigger expression as a status wire over canonical reads.

    Connectives are the three-valued boolean ones, mirroring the trigger
    evaluation of the reference interpreter bit for bit.
    """
    def build(e: SigExpr) -> tuple[BoolExpr, BoolExpr]:
        match e:
            case Sig(name):
                return pair_of(scope.read(name))
            case And(l, r):
                return kand_pairs(build(l), build(r))
            case Or(l, r):
                return kor_pairs(build(l), build(r))
            case Not(a):
                d, v = build(a)
                return d, band(d, bnot(v))
        raise TypeError(e)

    return b.pair_wire(f"{at}.trig", build(e))


@dataclass(frozen=True)
class Reset:
    """Reinit split by rank.

    Weak resets mark iteration boundaries: a register receiving its control
    pulse in the same instant re-arms (the restarted body must live).  Strong
    resets are preemptions: nothing survives them into the next instant.
    """
    strong: BoolExpr
    weak: BoolExpr

    def with_weak(self, bit: BoolExpr) -> "Reset":
        return Reset(self.strong, bor(self.weak, bit))

    def with_strong(self, bit: BoolExpr) -> "Reset":
        return Reset(bor(self.strong, bit), self.weak)


def _activity_register(b: Builder, name: str, arm: BoolExpr, reset: Reset) -> str:
    """Marks a statement as started: arm wins over a weak reset."""
    prev = BProj("val", name, is_reg=True)
    nxt = XOfBool(bor(band(arm, bnot(reset.strong)),
                      band(prev, bnot(reset.strong), bnot(reset.weak))))
    return b.add_register(name, nxt)


def _completion_register(b: Builder, name: str, arm: BoolExpr, reset: Reset) -> str:
    """Sustains a branch's earlier termination: any reset clears it."""
    prev = BProj("val", name, is_reg=True)
    nxt = XOfBool(band(bor(arm, prev), bnot(reset.strong), bnot(reset.weak)))
    return b.add_register(name, nxt)


def _compile_statement(b: Builder, scope: _Scope, s: Statement,
                       set_w: str, reset: Reset,
                       resolved: ResolvedModule) -> str:
    """Compile one statement; returns its ready-to-leave wire."""
    n = b.node()
    match s:
        case Nothing():
            return b.define(f"{n}.rtl", XWire(set_w))
        case Halt():
            return b.define(f"{n}.rtl", XConst(ZERO))
        case Emit(sig):
            rtl = b.define(f"{n}.rtl", XWire(set_w))
            scope.slot(sig).contribs.append(pair_of(rtl))
            return rtl
        case Pause():
            actif = _activity_register(b, f"{n}.actif", BProj("val", set_w), reset)
            return b.define(f"{n}.rtl", XOfBool(BProj("val", actif, is_reg=True)))
        case Wait(sig):
            actif = _activity_register(b, f"{n}.actif", BProj("val", set_w), reset)
            sd, sv = pair_of(scope.read(sig))
            av = BProj("val", actif, is_reg=True)
            return b.pair_wire(f"{n}.rtl", (bor(bnot(av), sd), band(av, sd, sv)))
        case Present(trig, then, orelse):
            tw = _sig_expr_wire(b, scope, trig, n)
            td, tv = pair_of(tw)
            sd, sv = pair_of(set_w)
            c_then, c_else, c_err = band(td, tv), band(td, bnot(tv)), band(bnot(td), tv)
            set1 = b.pair_wire(f"{n}.set1", (band(sd, td), band(sv, c_then)))
            set2 = b.pair_wire(f"{n}.set2", (band(sd, td), band(sv, c_else)))
            rtl1 = _compile_statement(b, scope, then, set1, reset, resolved)
            rtl2 = _compile_statement(b, scope, orelse, set2, reset, resolved)
            err = band(sv, c_err)
            b.err_sites.append(err)
            rtl = kor_pairs(pair_of(rtl1), pair_of(rtl2), (TRUE, err))
            return b.pair_wire(f"{n}.rtl", rtl)
        case Par(left, right):
            rtl1 = _compile_statement(b, scope, left, set_w, reset, resolved)
            rtl2 = _compile_statement(b, scope, right, set_w, reset, resolved)
            a1 = _completion_register(b, f"{n}.done1", BProj("val", rtl1), reset)
            a2 = _completion_register(b, f"{n}.done2", BProj("val", rtl2), reset)
            rtl = kand_pairs(kor_pairs(pair_of(rtl1), reg_pair(a1)),
                             kor_pairs(pair_of(rtl2), reg_pair(a2)))
            return b.pair_wire(f"{n}.rtl", rtl)
        case Seq(first, second):
            done1 = b.declare_wire(f"{n}.done1")
            rtl1 = _compile_statement(b, scope, first, set_w,
                                      reset.with_weak(BProj("val", done1)), resolved)
            b.circuit.wires[done1] = XWire(rtl1)
            rtl2 = _compile_statement(b, scope, second, rtl1, reset, resolved)
            return b.define(f"{n}.rtl", XWire(rtl2))
        case Abort(body, sig):
            actif = f"{n}.actif"
            sd, sv = pair_of(scope.read(sig))
            present = band(sd, sv)
            rtl_p = _compile_statement(b, scope, body, set_w,
                                       reset.with_strong(present), resolved)
            pd, pv = pair_of(rtl_p)
            active = bor(BProj("val", set_w), BProj("val", actif, is_reg=True))
            rtl = b.pair_wire(f"{n}.rtl",
                              (bor(present, band(bnot(present), pd)),
                               bor(band(present, active), band(bnot(present), pv))))
            # an abort can pass straight through at its arrival instant
            # (aborting signal already present, or instantaneous body);
            # it must not mark itself active in that case
            prev = BProj("val", actif, is_reg=True)
            arm = band(BProj("val", set_w), bnot(BProj("val", rtl)))
            b.add_register(actif, XOfBool(
                bor(band(arm, bnot(reset.strong)),
                    band(prev, bnot(reset.strong), bnot(reset.weak)))))
            return rtl
        case Loop(body):
            body_set = b.declare_wire(f"{n}.bodyset")
            again = b.declare_wire(f"{n}.again")
            rtl_p = _compile_statement(b, scope, body, body_set,
                                       reset.with_weak(BProj("val", again)), resolved)
            b.circuit.wires[again] = XWire(rtl_p)
            b.circuit.wires[body_set] = XPair(*kor_pairs(pair_of(set_w), pair_of(rtl_p)))
            return b.define(f"{n}.rtl", XConst(ZERO))
        case Local(names, body):
            scope.push()
            canon = []
            for name in names:
                canon.append(scope.declare(name, "local",
                                           f"{name}%{next(b.local_counter)}"))
            rtl = _compile_statement(b, scope, body, set_w, reset, resolved)
            for c in canon:
                _close_local(b, scope.slots[c])
            scope.pop()
            return b.define(f"{n}.rtl", XWire(rtl))
        case Run(module, renamings):
            return _compile_run(b, scope, module, renamings, n, set_w, reset, resolved)
    raise TypeError(s)


def _instantiate_callee(b: Builder, scope: _Scope, module: str, renamings, n: str,
                        set_w: str, reset: Reset, resolved: ResolvedModule) -> str:
    """Wire a callee body under the given control; returns its ready-to-leave wire.

    Source callees inline; compiled ones leave a socket whose ready-to-leave and
    per-output contribution pairs are named now and defined by the splice.
    """
    callee = resolved.callees[module]
    rename = {formal: new for new, formal in renamings}
    if isinstance(callee, CompiledCallee):
        prefix = f"i{next(b.instance_counter)}${module}"
        binding = {}
        for sig in itertools.chain(callee.inputs, callee.outputs):
            binding[sig] = scope.canonical(rename.get(sig, sig))
        kill_w = b.pair_wire(f"{n}.kill", (TRUE, reset.strong))
        rst_w = b.pair_wire(f"{n}.rst", (TRUE, reset.weak))
        b.circuit.sockets.append(Socket(prefix, callee, binding, set_w, rst_w, kill_w))
        for sig in callee.outputs:
            scope.slots[binding[sig]].foreign.append(
                (f"{prefix}.{sig}$cur", f"{prefix}.{sig}"))
        b.err_sites.append(BProj("val", f"{prefix}.err$all"))
        return f"{prefix}.{RESERVED_RTL}"
    # bind the callee's interface names directly onto the caller's slots;
    # caller names resolve before the new frame exists
    bindings = {sig: scope.canonical(rename.get(sig, sig))
                for sig in itertools.chain(callee.module.inputs, callee.module.outputs)}
    scope.push()
    scope.frames[-1].update(bindings)
    rtl_p = _compile_body(b, scope, callee.module.body, set_w, reset, callee)
    scope.pop()
    return rtl_p


def _compile_run(b: Builder, scope: _Scope, module: str, renamings, n: str,
                 set_w: str, reset: Reset, resolved: ResolvedModule) -> str:
    a1 = _activity_register(b, f"{n}.run1", BProj("val", set_w), reset)
    rtl_p = _instantiate_callee(b, scope, module, renamings, n, set_w, reset, resolved)
    a2 = _completion_register(b, f"{n}.run2", BProj("val", rtl_p), reset)
    rtl = kand_pairs(reg_pair(a1), kor_pairs(pair_of(rtl_p), reg_pair(a2)))
    return b.pair_wire(f"{n}.rtl", rtl)


def _compile_body(b: Builder, scope: _Scope, body: Body, set_w: str, reset: Reset,
                  resolved: ResolvedModule) -> str:
    if isinstance(body, Automaton):
        return _compile_automaton(b, scope, body, set_w, reset, resolved)
    return _compile_statement(b, scope, body, set_w, reset, resolved)


def _compile_automaton(b: Builder, scope: _Scope, a: Automaton,
                       set_w: str, reset: Reset, resolved: ResolvedModule) -> str:
    n = b.node()
    trig_true: list[BoolExpr] = []
    for j, tr in enumerate(a.transitions):
        if tr.trigger is None:
            trig_true.append(TRUE)
        else:
            tw = _sig_expr_wire(b, scope, tr.trigger, f"{n}.t{j}")
            td, tv = pair_of(tw)
            trig_true.append(band(td, tv))

    state_rtl: dict[str, str] = {}
    for st in a.states:
        state_rtl[st.name] = b.declare_wire(f"{n}.st.{st.name}.rtl")

    take: list[tuple[BoolExpr, BoolExpr]] = []
    for j, tr in enumerate(a.transitions):
        src_pair = pair_of(set_w) if tr.initial else pair_of(state_rtl[tr.source])
        taken = b.pair_wire(f"{n}.t{j}.take",
                            (band(src_pair[0], trig_true[j]),
                             band(src_pair[1], trig_true[j])))
        take.append(pair_of(taken))
        for sig in tr.action:
            scope.slot(sig).contribs.append(pair_of(taken))

    for st in a.states:
        arrivals = [take[j] for j, tr in enumerate(a.transitions) if tr.target == st.name]
        st_set = b.pair_wire(f"{n}.st.{st.name}.set",
                             kor_pairs(*arrivals) if arrivals else (TRUE, FALSE))
        departures = bor(*(take[j][1] for j, tr in enumerate(a.transitions)
                           if not tr.initial and tr.source == st.name))
        st_reset = reset.with_weak(departures)
        if st.run is None:
            actif = _activity_register(b, f"{n}.st.{st.name}.actif",
                                       BProj("val", st_set), st_reset)
            b.circuit.wires[state_rtl[st.name]] = XOfBool(
                BProj("val", actif, is_reg=True))
        else:
            # a hosting state combines its own one-instant delay with the
            # callee: control reaches the callee once the state is active
            a1 = _activity_register(b, f"{n}.st.{st.name}.run1",
                                    BProj("val", st_set), st_reset)
            cset = b.pair_wire(f"{n}.st.{st.name}.cset", reg_pair(a1))
            rtl_p = _instantiate_callee(b, scope, st.run.module, st.run.renamings,
                                        f"{n}.st.{st.name}", cset, st_reset, resolved)
            a2 = _completion_register(b, f"{n}.st.{st.name}.run2",
                                      BProj("val", rtl_p), st_reset)
            rtl = kand_pairs(reg_pair(a1), kor_pairs(pair_of(rtl_p), reg_pair(a2)))
            b.circuit.wires[state_rtl[st.name]] = XPair(*rtl)

    final = next(st.name for st in a.states if st.final)
    return b.define(f"{n}.rtl", XWire(state_rtl[final]))


def _close_local(b: Builder, slot: _Slot) -> None:
    _define_read_wire(b, slot)


def _site_pairs(slot: _Slot) -> list[tuple[BoolExpr, BoolExpr]]:
    return list(slot.contribs) + [pair_of(cur) for cur, _rep in slot.foreign]


def _define_read_wire(b: Builder, slot: _Slot) -> None:
    """The canonical status every reader of the signal sees.

    For inputs: the environment's pair joined with any emission, so a
    contradictory double status surfaces.  For locals and outputs: present
    once a site fires, absent once every site is decided unfired; an unknown
    stays only while some emitting site's control is itself undecided.
    """
    cur = f"{slot.name}$cur"
    pairs = _site_pairs(slot)
    if slot.kind == "input":
        if not pairs:
            b.circuit.wires[cur] = XInput(slot.name)
        else:
            v = bor(*(p[1] for p in pairs))
            d = bor(*(band(p[0], p[1]) for p in pairs))
            b.circuit.wires[cur] = XJoin(XInput(slot.name), XPair(d, v))
    else:
        b.circuit.wires[cur] = XPair(*kor_pairs(*pairs))


def _define_report_wire(b: Builder, slot: _Slot, err: BoolExpr) -> None:
    expr: XiExpr = XJoin(XWire(f"{slot.name}$cur"), XCond(XConst(TOP), err))
    b.circuit.wires[b.circuit.rep_wire(slot.name)] = expr


def apply_pre(circuit: Circuit) -> Circuit:
    """Shadow every non-interface signal's current status into a `$pre` wire.

    Interface signals are left alone.  The shadow taps the canonical read wire
    of the instant being computed; reapplying is a no-op.
    """
    interface = set(circuit.inputs) | set(circuit.outputs)
    for name in circuit.locals:
        if name in interface:
            continue
        shadow = f"{name}$pre"
        if shadow in circuit.wires:
            continue
        circuit.wires[shadow] = XWire(circuit.read_wire(name))
    return circuit


def compile_module_circuit(resolved: ResolvedModule) -> Circuit:
    """Translate a resolved module into a status circuit.

    Source callees are inlined; compiled callees become sockets resolved at
    lowering time.  The module's own control enters through the reserved
    `_set`/`_reset` input pair and leaves through the `_rtl` report wire; a
    compiled unit is closed (given its boot register) only at finalization.
    """
    m = resolved.module
    b = Builder(m.name)
    c = b.circuit
    c.inputs = tuple(m.inputs)
    c.outputs = tuple(m.outputs)

    scope = _Scope(b)
    for sig in m.inputs:
        scope.declare(sig, "input")
    for sig in m.outputs:
        scope.declare(sig, "output")

    top_set = b.define("top.set", XInput(RESERVED_SET))
    top_reset = b.define("top.reset", XInput(RESERVED_RESET))
    top_kill = b.define("top.kill", XInput(RESERVED_KILL))
    c.set_wire, c.reset_wire = top_set, top_reset

    reset = Reset(strong=BProj("val", top_kill), weak=BProj("val", top_reset))
    rtl = _compile_body(b, scope, m.body, top_set, reset, resolved)

    err = bor(*b.err_sites)
    b.define(c.err_wire, XOfBool(err))
    for sig in m.inputs:
        _define_read_wire(b, scope.slots[scope.canonical(sig)])
    for sig in m.outputs:
        slot = scope.slots[scope.canonical(sig)]
        _define_read_wire(b, slot)
        _define_report_wire(b, slot, err)
    c.locals = tuple(name for name, slot in scope.slots.items() if slot.kind == "local")

    c.rtl_wire = b.define(RESERVED_RTL, XWire(rtl))
    if c.registers:
        apply_pre(c)

    missing = [w for w, e in c.wires.items() if e is None]
    if missing:
        raise InternalFault(f"undefined wires: {missing}")
    return c


# --- direct evaluation -----------------------------------------------------------

def _expr_deps(e: XiExpr) -> set[str]:
    match e:
        case XConst(_) | XInput(_) | XReg(_):
            return set()
        case XWire(w):
            return {w}
        case XJoin(l, r) | XMeet(l, r):
            return _expr_deps(l) | _expr_deps(r)
        case XNot(a):
            return _expr_deps(a)
        case XCond(a, c):
            return _expr_deps(a) | _bool_deps(c)
        case XGate(a, s):
            return _expr_deps(a) | _expr_deps(s)
        case XOfBool(c):
            return _bool_deps(c)
        case XPair(d, v):
            return _bool_deps(d) | _bool_deps(v)
    raise TypeError(e)


def _bool_deps(c: BoolExpr) -> set[str]:
    from .bexpr import atoms
    out = set()
    for a in atoms(c):
        if isinstance(a, BProj) and not a.is_reg:
            out.add(a.wire)
    return out


def toposort(deps: dict[str, set[str]]) -> list[str]:
    """Order nodes so dependencies come first; raises CausalityCycle otherwise."""
    order: list[str] = []
    mark: dict[str, int] = {}
    for root in sorted(deps):
        if mark.get(root) == 2:
            continue
        stack: list[tuple[str, list[str], int]] = [(root, sorted(deps[root]), 0)]
        mark[root] = 1
        while stack:
            node, children, idx = stack[-1]
            if idx == len(children):
                stack.pop()
                mark[node] = 2
                order.append(node)
                continue
            stack[-1] = (node, children, idx + 1)
            child = children[idx]
            if child not in deps:
                continue
            state = mark.get(child)
            if state == 2:
                continue
            if state == 1:
                path = [entry[0] for entry in stack]
                cycle = path[path.index(child):] + [child]
                raise CausalityCycle(cycle)
            mark[child] = 1
            stack.append((child, sorted(deps[child]), 0))
    return order


def wire_order(circuit: Circuit) -> list[str]:
    """Topological order of the wires; raises on instantaneous cycles."""
    deps = {w: _expr_deps(e) & circuit.wires.keys()
            for w, e in circuit.wires.items() if e is not None}
    return toposort(deps)


def step_circuit(circuit: Circuit, regs: dict[str, Xi], inputs: dict[str, Xi],
                 order: list[str] | None = None) -> tuple[dict[str, Xi], dict[str, Xi]]:
    """One constructive evaluation of the circuit: wire values and next registers."""
    if circuit.sockets:
        raise InternalFault("circuit has unresolved compiled callees")
    order = order or wire_order(circuit)
    vals: dict[str, Xi] = {}

    def blookup(atom) -> bool:
        if not isinstance(atom, BProj):
            raise InternalFault(f"unexpected atom {atom!r} in circuit")
        value = regs[atom.wire] if atom.is_reg else vals[atom.wire]
        d, v = encode(value)
        return d if atom.part == "def" else v

    def ev(e: XiExpr) -> Xi:
        match e:
            case XConst(x):
                return x
            case XInput(s):
                return inputs.get(s, BOT)
            case XWire(w):
                return vals[w]
            case XReg(r):
                return regs[r]
            case XJoin(l, r):
                return xi_join(ev(l), ev(r))
            case XMeet(l, r):
                return xi_meet(ev(l), ev(r))
            case XNot(a):
                return xi_not(ev(a))
            case XCond(a, c):
                return xi_cond(ev(a), eval_bool(c, blookup))
            case XGate(a, s):
                return xi_gate(ev(a), ev(s))
            case XOfBool(c):
                return of_bool(eval_bool(c, blookup))
            case XPair(d, v):
                return decode((eval_bool(d, blookup), eval_bool(v, blookup)))
        raise TypeError(e)

    for w in order:
        vals[w] = ev(circuit.wires[w])
    next_regs = {}
    for r in circuit.registers:
        value = ev(r.next)
        if not encode(value)[0]:
            raise InternalFault(f"register {r.name} fed an undecided value")
        next_regs[r.name] = value
    return vals, next_regs


def compose(env: dict[str, Xi], circuit: Circuit,
            regs: dict[str, Xi] | None = None) -> dict[str, Xi]:
    """Evaluate the circuit against an environment of inputs and registers.

    Returns the environment extended with every wire's status; signal names map
    to their canonical read value.
    """
    regs = regs if regs is not None else {r.name: ZERO for r in circuit.registers}
    vals, _ = step_circuit(circuit, regs, dict(env))
    out = dict(vals)
    for sig in itertools.chain(circuit.inputs, circuit.outputs, circuit.locals):
        cur = circuit.read_wire(sig)
        if cur in vals:
            out[sig] = vals[cur]
    return out

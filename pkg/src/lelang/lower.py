"""Lowering of status circuits onto plain boolean equation systems.

Every status wire becomes a def/val pair of boolean equations; status
registers become one latch holding the value bit (their decided bit is
constant).  Compiled callees are spliced in afterwards: the callee system's
wires are renamed under the instance prefix and its free interface wires are
substituted with the caller's.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .bexpr import (
    FALSE, TRUE, BConst, BoolExpr, BProj, BRef, atoms, band, bnot, bor,
    substitute,
)
from .circuit import (
    Circuit, Socket, XConst, XCond, XGate, XInput, XJoin, XMeet, XNot,
    XOfBool, XPair, XReg, XWire, XiExpr, RESERVED_KILL, RESERVED_RESET,
    RESERVED_RTL, RESERVED_SET,
)
from .xi import InternalFault, encode


@dataclass(frozen=True)
class Latch:
    name: str
    init: bool
    next_wire: str


@dataclass
class BooleanSystem:
    name: str
    inputs: tuple[str, ...]   # status signal names, reserved control included
    outputs: tuple[str, ...]
    latches: list[Latch] = field(default_factory=list)
    equations: dict[str, BoolExpr] = field(default_factory=dict)

    def define(self, wire: str, expr: BoolExpr) -> None:
        if wire in self.equations:
            raise InternalFault(f"wire {wire} defined twice")
        self.equations[wire] = expr

    def input_wires(self) -> set[str]:
        out = set()
        for sig in self.inputs:
            out.add(f"{sig}_def")
            out.add(f"{sig}_val")
        return out

    def latch_names(self) -> set[str]:
        return {l.name for l in self.latches}

    def free_wires(self) -> set[str]:
        """Wires referenced but not defined: must be input pairs or latches."""
        defined = set(self.equations)
        refs: set[str] = set()
        for expr in self.equations.values():
            for a in atoms(expr):
                refs.add(a.wire)
        return refs - defined

    def signal_pair(self, sig: str) -> tuple[str, str]:
        return f"{sig}_def", f"{sig}_val"

    def read_pair(self, sig: str) -> tuple[str, str]:
        return f"{sig}$cur_def", f"{sig}$cur_val"

    def copy(self) -> "BooleanSystem":
        return BooleanSystem(self.name, self.inputs, self.outputs,
                             list(self.latches), dict(self.equations))


def _lower_bool(c: BoolExpr) -> BoolExpr:
    def leaf(a: BoolExpr) -> BoolExpr:
        if isinstance(a, BProj):
            if a.is_reg:
                return TRUE if a.part == "def" else BRef(a.wire)
            return BRef(f"{a.wire}_{a.part}")
        return a

    return substitute(c, leaf)


def lower_expr(e: XiExpr) -> tuple[BoolExpr, BoolExpr]:
    """Structural def/val lowering of one status expression."""
    match e:
        case XConst(x):
            d, v = encode(x)
            return BConst(d), BConst(v)
        case XInput(s):
            return BRef(f"{s}_def"), BRef(f"{s}_val")
        case XWire(w):
            return BRef(f"{w}_def"), BRef(f"{w}_val")
        case XReg(r):
            return TRUE, BRef(r)
        case XJoin(l, r):
            ld, lv = lower_expr(l)
            rd, rv = lower_expr(r)
            same = bor(band(lv, rv), band(bnot(lv), bnot(rv)))
            d = bor(band(ld, bnot(rd), bnot(rv)),
                    band(rd, bnot(ld), bnot(lv)),
                    band(ld, rd, same))
            return d, bor(lv, rv)
        case XMeet(l, r):
            ld, lv = lower_expr(l)
            rd, rv = lower_expr(r)
            same = bor(band(lv, rv), band(bnot(lv), bnot(rv)))
            d = bor(band(ld, bnot(rd), rv),
                    band(rd, bnot(ld), lv),
                    band(ld, rd, same))
            return d, band(lv, rv)
        case XNot(a):
            ad, av = lower_expr(a)
            return ad, bnot(av)
        case XCond(a, c):
            ad, av = lower_expr(a)
            cb = _lower_bool(c)
            return band(ad, cb), band(av, cb)
        case XGate(a, s):
            ad, av = lower_expr(a)
            _, sv = lower_expr(s)
            return TRUE, band(ad, av, sv)
        case XOfBool(c):
            return TRUE, _lower_bool(c)
        case XPair(d, v):
            return _lower_bool(d), _lower_bool(v)
    raise TypeError(e)


def lower(circuit: Circuit) -> BooleanSystem:
    """Two boolean equations per status wire, one latch per status register."""
    sys = BooleanSystem(
        circuit.name,
        (RESERVED_SET, RESERVED_RESET, RESERVED_KILL) + tuple(circuit.inputs),
        (RESERVED_RTL,) + tuple(circuit.outputs),
    )
    for wire, expr in circuit.wires.items():
        if expr is None:
            raise InternalFault(f"wire {wire} has no definition")
        d, v = lower_expr(expr)
        sys.define(f"{wire}_def", d)
        sys.define(f"{wire}_val", v)
    for reg in circuit.registers:
        d, v = lower_expr(reg.next)
        if d != TRUE:
            raise InternalFault(f"register {reg.name} next value is not decided")
        nxt = f"{reg.name}$nxt"
        sys.define(nxt, v)
        sys.latches.append(Latch(reg.name, reg.init, nxt))
    return sys


def splice(sys: BooleanSystem, socket: Socket, callee: BooleanSystem) -> None:
    """Inline a compiled callee under its instance prefix.

    The callee's free interface wires rebind: its signal inputs read the
    caller's canonical read wires, its control pair reads the run site's.
    """
    prefix = socket.prefix + "."
    defined = set(callee.equations) | callee.latch_names()

    submap: dict[str, BoolExpr] = {}
    for sig, caller_name in socket.binding.items():
        if sig in callee.inputs:
            cd, cv = f"{caller_name}$cur_def", f"{caller_name}$cur_val"
            submap[f"{sig}_def"] = BRef(cd)
            submap[f"{sig}_val"] = BRef(cv)
    for reserved, site in ((RESERVED_SET, socket.set_wire),
                           (RESERVED_RESET, socket.reset_wire),
                           (RESERVED_KILL, socket.kill_wire)):
        submap[f"{reserved}_def"] = BRef(f"{site}_def")
        submap[f"{reserved}_val"] = BRef(f"{site}_val")

    def remap(a: BoolExpr) -> BoolExpr:
        assert isinstance(a, BRef)
        if a.wire in defined:
            return BRef(prefix + a.wire)
        if a.wire in submap:
            return submap[a.wire]
        raise InternalFault(f"{callee.name}: unbound wire {a.wire} at splice")

    for wire, expr in callee.equations.items():
        sys.define(prefix + wire, substitute(expr, remap))
    for latch in callee.latches:
        sys.latches.append(Latch(prefix + latch.name, latch.init,
                                 prefix + latch.next_wire))


def lower_module(circuit: Circuit, callee_systems: dict[str, BooleanSystem]) -> BooleanSystem:
    """Lower a circuit and splice every compiled callee it references."""
    sys = lower(circuit)
    for socket in circuit.sockets:
        callee = callee_systems[socket.callee.name]
        splice(sys, socket, callee)
    dangling = sys.free_wires() - sys.input_wires() - sys.latch_names()
    if dangling:
        raise InternalFault(f"dangling wires after lowering: {sorted(dangling)}")
    return sys

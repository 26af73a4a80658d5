"""Small boolean expression algebra shared by the circuit IR and the lowering.

Atoms are either named boolean wires or def/val projections of status-valued
wires; constructors flatten, deduplicate and constant-fold so systems stay
readable, but no canonicalization happens here (that is the finalizer's job).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


class BoolExpr:
    __slots__ = ()


@dataclass(frozen=True)
class BConst(BoolExpr):
    value: bool

    def __repr__(self):
        return "1" if self.value else "0"


@dataclass(frozen=True)
class BRef(BoolExpr):
    """A named boolean wire (or latch) in a lowered system."""
    wire: str

    def __repr__(self):
        return self.wire


@dataclass(frozen=True)
class BProj(BoolExpr):
    """def/val projection of a status wire or register in a circuit."""
    part: str  # 'def' | 'val'
    wire: str
    is_reg: bool = False

    def __repr__(self):
        return f"{self.wire}.{self.part}"


@dataclass(frozen=True)
class BNot(BoolExpr):
    arg: BoolExpr

    def __repr__(self):
        return f"!{self.arg!r}"


@dataclass(frozen=True)
class BAnd(BoolExpr):
    args: tuple[BoolExpr, ...]

    def __repr__(self):
        return "(" + " & ".join(map(repr, self.args)) + ")"


@dataclass(frozen=True)
class BOr(BoolExpr):
    args: tuple[BoolExpr, ...]

    def __repr__(self):
        return "(" + " | ".join(map(repr, self.args)) + ")"


TRUE = BConst(True)
FALSE = BConst(False)


def bnot(e: BoolExpr) -> BoolExpr:
    if isinstance(e, BConst):
        return BConst(not e.value)
    if isinstance(e, BNot):
        return e.arg
    return BNot(e)


def _gather(op, args: Iterable[BoolExpr]):
    for a in args:
        if isinstance(a, op):
            yield from a.args
        else:
            yield a


def band(*args: BoolExpr) -> BoolExpr:
    flat = []
    seen = set()
    for a in _gather(BAnd, args):
        if isinstance(a, BConst):
            if not a.value:
                return FALSE
            continue
        if a not in seen:
            seen.add(a)
            flat.append(a)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return BAnd(tuple(flat))


def bor(*args: BoolExpr) -> BoolExpr:
    flat = []
    seen = set()
    for a in _gather(BOr, args):
        if isinstance(a, BConst):
            if a.value:
                return TRUE
            continue
        if a not in seen:
            seen.add(a)
            flat.append(a)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return BOr(tuple(flat))


def atoms(e: BoolExpr) -> set[BoolExpr]:
    """All BRef/BProj leaves of an expression."""
    match e:
        case BConst(_):
            return set()
        case BRef(_) | BProj(_, _, _):
            return {e}
        case BNot(a):
            return atoms(a)
        case BAnd(args) | BOr(args):
            out = set()
            for a in args:
                out |= atoms(a)
            return out
    raise TypeError(e)


def eval_bool(e: BoolExpr, lookup) -> bool:
    """Evaluate with `lookup(atom) -> bool` supplying leaf values."""
    match e:
        case BConst(v):
            return v
        case BRef(_) | BProj(_, _, _):
            return lookup(e)
        case BNot(a):
            return not eval_bool(a, lookup)
        case BAnd(args):
            return all(eval_bool(a, lookup) for a in args)
        case BOr(args):
            return any(eval_bool(a, lookup) for a in args)
    raise TypeError(e)


def substitute(e: BoolExpr, mapping) -> BoolExpr:
    """Rebuild with `mapping(atom) -> BoolExpr` replacing leaves."""
    match e:
        case BConst(_):
            return e
        case BRef(_) | BProj(_, _, _):
            return mapping(e)
        case BNot(a):
            return bnot(substitute(a, mapping))
        case BAnd(args):
            return band(*(substitute(a, mapping) for a in args))
        case BOr(args):
            return bor(*(substitute(a, mapping) for a in args))
    raise TypeError(e)

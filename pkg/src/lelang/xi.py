"""Four-valued signal status algebra and environments.

A signal status within one reaction is one of four values: unknown (BOT),
absent (ZERO), present (ONE) or contradictory (TOP).  The algebra provides
join/meet/not plus a condition law and a gating product, and every value
encodes as a (def, val) pair of booleans.  Environments are finite maps
from signal name to status with the operations lifted pointwise.
"""

from __future__ import annotations

import enum
from typing import Iterable, Mapping


class InternalFault(Exception):
    """Raised when an operation precondition is violated by the toolchain itself."""


class Xi(enum.Enum):
    BOT = "bot"      # unknown
    ZERO = "zero"    # absent
    ONE = "one"      # present
    TOP = "top"      # contradictory / error

    def __repr__(self) -> str:
        return _SYMBOL[self]

    def __str__(self) -> str:
        return _SYMBOL[self]


BOT, ZERO, ONE, TOP = Xi.BOT, Xi.ZERO, Xi.ONE, Xi.TOP

ALL_VALUES = (BOT, ZERO, ONE, TOP)

_SYMBOL = {BOT: "_", ZERO: "0", ONE: "1", TOP: "#"}

# Encoding table: value -> (def, val).
_ENCODE = {ONE: (True, True), ZERO: (True, False), TOP: (False, True), BOT: (False, False)}
_DECODE = {pair: v for v, pair in _ENCODE.items()}

# Join: least upper bound in the status lattice (BOT below ZERO/ONE below TOP).
_JOIN = {
    (ONE, ONE): ONE, (ONE, ZERO): TOP, (ONE, TOP): TOP, (ONE, BOT): ONE,
    (ZERO, ONE): TOP, (ZERO, ZERO): ZERO, (ZERO, TOP): TOP, (ZERO, BOT): ZERO,
    (TOP, ONE): TOP, (TOP, ZERO): TOP, (TOP, TOP): TOP, (TOP, BOT): TOP,
    (BOT, ONE): ONE, (BOT, ZERO): ZERO, (BOT, TOP): TOP, (BOT, BOT): BOT,
}

# Meet: greatest lower bound.
_MEET = {
    (ONE, ONE): ONE, (ONE, ZERO): BOT, (ONE, TOP): ONE, (ONE, BOT): BOT,
    (ZERO, ONE): BOT, (ZERO, ZERO): ZERO, (ZERO, TOP): ZERO, (ZERO, BOT): BOT,
    (TOP, ONE): ONE, (TOP, ZERO): ZERO, (TOP, TOP): TOP, (TOP, BOT): BOT,
    (BOT, ONE): BOT, (BOT, ZERO): BOT, (BOT, TOP): BOT, (BOT, BOT): BOT,
}

_NOT = {ONE: ZERO, ZERO: ONE, TOP: BOT, BOT: TOP}


def xi_join(x: Xi, y: Xi) -> Xi:
    return _JOIN[(x, y)]


def xi_meet(x: Xi, y: Xi) -> Xi:
    return _MEET[(x, y)]


def xi_not(x: Xi) -> Xi:
    return _NOT[x]


def xi_cond(x: Xi, c: bool) -> Xi:
    """Condition law: keep the status when c holds, drop to unknown otherwise."""
    return x if c else BOT


def xi_gate(x: Xi, y: Xi) -> Xi:
    """Gating product of a status by a synchronization value.

    y must be a decided value (absent or present); the result is decided,
    with value def(x) & val(x) & val(y).
    """
    yd, yv = encode(y)
    if not yd:
        raise InternalFault(f"gate applied to undecided synchronization value {y}")
    xd, xv = encode(x)
    return of_bool(xd and xv and yv)


def xi_derived(kind: str, x: Xi, y: Xi) -> Xi:
    """Derived two-argument operators expressed over join/meet/not."""
    if kind == "xor":
        return xi_join(xi_meet(x, xi_not(y)), xi_meet(y, xi_not(x)))
    if kind == "nor":
        return xi_meet(xi_not(x), xi_not(y))
    if kind == "nand":
        return xi_join(xi_not(x), xi_not(y))
    if kind == "iff":
        return xi_join(xi_meet(xi_not(x), xi_not(y)), xi_meet(x, y))
    if kind == "implies":
        return xi_join(xi_not(x), y)
    raise ValueError(f"unknown derived operator {kind!r}")


def encode(x: Xi) -> tuple[bool, bool]:
    """Encode a status as its (def, val) boolean pair."""
    return _ENCODE[x]


def decode(pair: tuple[bool, bool]) -> Xi:
    """Inverse of encode."""
    return _DECODE[(bool(pair[0]), bool(pair[1]))]


def of_bool(b: bool) -> Xi:
    """Inject a plain boolean: decided present/absent."""
    return ONE if b else ZERO


def xi_le(x: Xi, y: Xi) -> bool:
    """Lattice order: BOT below ZERO and ONE, both below TOP; ZERO, ONE incomparable."""
    return xi_join(x, y) == y


# Three-valued boolean connectives over the pair encoding, used for trigger
# expressions: decided operands behave classically, an undecided operand
# decides the result only when the other side forces it.  Unlike the status
# join/meet they never fabricate a contradiction from two decided statuses.

def xi_kleene_or(x: Xi, y: Xi) -> Xi:
    xd, xv = encode(x)
    yd, yv = encode(y)
    v = xv or yv
    d = (xd and xv) or (yd and yv) or (xd and not xv and yd and not yv)
    return decode((d, v))


def xi_kleene_and(x: Xi, y: Xi) -> Xi:
    xd, xv = encode(x)
    yd, yv = encode(y)
    v = xv and yv
    d = (xd and not xv) or (yd and not yv) or (xd and xv and yd and yv)
    return decode((d, v))


def xi_kleene_not(x: Xi) -> Xi:
    xd, xv = encode(x)
    return decode((xd, xd and not xv))


# ---------------------------------------------------------------------------
# Environments: plain dicts from signal name to status.

Environment = dict[str, Xi]


def _aligned(a: Mapping[str, Xi], b: Mapping[str, Xi]) -> Iterable[str]:
    # Binary operations align domains by union; a missing name reads as BOT,
    # keeping the join's neutral element consistent with the lifted algebra.
    return sorted(set(a) | set(b))


def env_join(a: Mapping[str, Xi], b: Mapping[str, Xi]) -> Environment:
    return {s: xi_join(a.get(s, BOT), b.get(s, BOT)) for s in _aligned(a, b)}


def env_meet(a: Mapping[str, Xi], b: Mapping[str, Xi]) -> Environment:
    return {s: xi_meet(a.get(s, BOT), b.get(s, BOT)) for s in _aligned(a, b)}


def env_not(a: Mapping[str, Xi]) -> Environment:
    return {s: xi_not(v) for s, v in a.items()}


def env_cond(a: Mapping[str, Xi], c: bool) -> Environment:
    return {s: xi_cond(v, c) for s, v in a.items()}


def env_preceq(a: Mapping[str, Xi], b: Mapping[str, Xi]) -> bool:
    """True when every entry of a is below the corresponding entry of b."""
    return all(s in b and xi_le(v, b[s]) for s, v in a.items())


def env_top(names: Iterable[str]) -> Environment:
    """All-contradictory environment over the given name domain."""
    return {s: TOP for s in names}


def env_bot(names: Iterable[str]) -> Environment:
    return {s: BOT for s in names}

"""Exhaustive checks of the four-valued algebra and its boolean encoding."""

import itertools

import pytest
from hypothesis import given, strategies as st

from lelang.xi import (
    ALL_VALUES, BOT, ONE, TOP, ZERO, InternalFault,
    decode, encode, env_bot, env_cond, env_join, env_meet, env_not,
    env_preceq, env_top, of_bool,
    xi_cond, xi_derived, xi_gate, xi_join, xi_le, xi_meet, xi_not,
)

V = ALL_VALUES
PAIRS = list(itertools.product(V, V))
TRIPLES = list(itertools.product(V, V, V))
BITS = (False, True)


def test_encoding_table():
    assert encode(ONE) == (True, True)
    assert encode(ZERO) == (True, False)
    assert encode(TOP) == (False, True)
    assert encode(BOT) == (False, False)
    for x in V:
        assert decode(encode(x)) == x


def test_join_table_spots():
    assert xi_join(ONE, ZERO) == TOP
    assert xi_join(TOP, ZERO) == TOP
    for x in V:
        assert xi_join(BOT, x) == x
        assert xi_join(x, TOP) == TOP


def test_meet_table_spots():
    assert xi_meet(ONE, ZERO) == BOT
    for y in V:
        assert xi_meet(BOT, y) == BOT
        assert xi_meet(TOP, y) == y


def test_not_table():
    assert xi_not(TOP) == BOT
    assert xi_not(ONE) == ZERO
    assert xi_not(ZERO) == ONE
    assert xi_not(BOT) == TOP
    for x in V:
        assert xi_not(xi_not(x)) == x


def test_cond_law():
    assert xi_cond(TOP, False) == BOT
    assert xi_cond(ZERO, True) == ZERO
    for x in V:
        assert xi_cond(x, True) == x
        assert xi_cond(x, False) == BOT
    # encoding identities for the condition law
    for x in V:
        for c in BITS:
            d, v = encode(xi_cond(x, c))
            xd, xv = encode(x)
            assert d == (xd and c)
            assert v == (xv and c)


def test_gate():
    assert xi_gate(ONE, ONE) == ONE
    assert xi_gate(BOT, ONE) == ZERO
    for x in V:
        assert xi_gate(x, ZERO) == ZERO
        xd, xv = encode(x)
        assert xi_gate(x, ONE) == of_bool(xd and xv)
    with pytest.raises(InternalFault):
        xi_gate(ONE, BOT)
    with pytest.raises(InternalFault):
        xi_gate(ZERO, TOP)


def test_derived_operators():
    assert xi_derived("xor", ONE, ONE) == xi_join(xi_meet(ONE, ZERO), xi_meet(ONE, ZERO))
    assert xi_derived("xor", ONE, ONE) == BOT
    assert xi_derived("nand", ONE, ONE) == ZERO
    for y in V:
        assert xi_derived("implies", ZERO, y) == xi_join(ONE, y)
    for x, y in PAIRS:
        assert xi_derived("xor", x, y) == xi_join(xi_meet(x, xi_not(y)), xi_meet(y, xi_not(x)))
        assert xi_derived("nor", x, y) == xi_meet(xi_not(x), xi_not(y))
        assert xi_derived("nand", x, y) == xi_join(xi_not(x), xi_not(y))
        assert xi_derived("iff", x, y) == xi_join(xi_meet(xi_not(x), xi_not(y)), xi_meet(x, y))
        assert xi_derived("implies", x, y) == xi_join(xi_not(x), y)
    with pytest.raises(ValueError):
        xi_derived("xnor", ONE, ONE)


# --- boolean-algebra axioms and theorems, exhaustively -----------------------

def test_commutativity():
    for x, y in PAIRS:
        assert xi_join(x, y) == xi_join(y, x)
        assert xi_meet(x, y) == xi_meet(y, x)


def test_associativity():
    for x, y, z in TRIPLES:
        assert xi_join(xi_join(x, y), z) == xi_join(x, xi_join(y, z))
        assert xi_meet(xi_meet(x, y), z) == xi_meet(x, xi_meet(y, z))


def test_distributivity_both_directions():
    for x, y, z in TRIPLES:
        assert xi_meet(x, xi_join(y, z)) == xi_join(xi_meet(x, y), xi_meet(x, z))
        assert xi_join(x, xi_meet(y, z)) == xi_meet(xi_join(x, y), xi_join(x, z))


def test_neutral_and_absorbing_elements():
    for x in V:
        assert xi_join(x, BOT) == x
        assert xi_meet(x, TOP) == x
        assert xi_join(x, TOP) == TOP
        assert xi_meet(x, BOT) == BOT


def test_complementarity():
    for x in V:
        assert xi_join(x, xi_not(x)) == TOP
        assert xi_meet(x, xi_not(x)) == BOT


def test_identity_and_redundancy_laws():
    for x in V:
        assert xi_join(x, x) == x
        assert xi_meet(x, x) == x
    for x, y in PAIRS:
        assert xi_join(x, xi_meet(x, y)) == x
        assert xi_meet(x, xi_join(x, y)) == x


def test_de_morgan():
    for x, y in PAIRS:
        assert xi_not(xi_join(x, y)) == xi_meet(xi_not(x), xi_not(y))
        assert xi_not(xi_meet(x, y)) == xi_join(xi_not(x), xi_not(y))


def test_lattice_order():
    assert xi_le(BOT, ZERO) and xi_le(BOT, ONE) and xi_le(ZERO, TOP) and xi_le(ONE, TOP)
    assert not xi_le(ZERO, ONE) and not xi_le(ONE, ZERO)
    for x in V:
        assert xi_le(x, x)
    # antisymmetry and transitivity
    for x, y in PAIRS:
        if xi_le(x, y) and xi_le(y, x):
            assert x == y
    for x, y, z in TRIPLES:
        if xi_le(x, y) and xi_le(y, z):
            assert xi_le(x, z)


def test_monotonicity():
    for x, y in PAIRS:
        if not xi_le(x, y):
            continue
        for z in V:
            assert xi_le(xi_join(x, z), xi_join(y, z))
            assert xi_le(xi_meet(x, z), xi_meet(y, z))


# --- encoding homomorphism ---------------------------------------------------

def _join_def(xd, xv, yd, yv):
    return (xd and not yd and not yv) or (yd and not xd and not xv) or (xd and yd and not (xv ^ yv))


def _meet_def(xd, xv, yd, yv):
    return (xd and not yd and yv) or (yd and not xd and xv) or (xd and yd and not (xv ^ yv))


def test_encoding_homomorphism_join_meet_not_cond():
    for x, y in PAIRS:
        xd, xv = encode(x)
        yd, yv = encode(y)
        jd, jv = encode(xi_join(x, y))
        assert jd == _join_def(xd, xv, yd, yv)
        assert jv == (xv or yv)
        md, mv = encode(xi_meet(x, y))
        assert md == _meet_def(xd, xv, yd, yv)
        assert mv == (xv and yv)
    for x in V:
        xd, xv = encode(x)
        nd, nv = encode(xi_not(x))
        assert nd == xd and nv == (not xv)
        for c in BITS:
            cd, cv = encode(xi_cond(x, c))
            assert cd == (xd and c) and cv == (xv and c)


def test_of_bool():
    for b in BITS:
        d, v = encode(of_bool(b))
        assert d is True and v == b


# --- environments ------------------------------------------------------------

def test_env_pointwise_examples():
    assert env_join({"S": ONE}, {"S": ZERO}) == {"S": TOP}
    assert env_cond({"S": ONE, "T": TOP}, False) == {"S": BOT, "T": BOT}
    e = {"A": ONE, "B": ZERO}
    assert env_join(e, env_bot(e)) == e


def test_env_union_alignment():
    out = env_join({"A": ONE}, {"B": ZERO})
    assert out == {"A": ONE, "B": ZERO}
    out = env_meet({"A": ONE}, {"B": ZERO})
    assert out == {"A": BOT, "B": BOT}


def test_env_top_helper():
    assert env_top(["X", "Y"]) == {"X": TOP, "Y": TOP}


def test_env_preceq_examples():
    assert env_preceq({"S": BOT}, {"S": ONE})
    assert not env_preceq({"S": ONE}, {"S": ZERO})
    e = {"S": ONE, "T": BOT}
    assert env_preceq(e, e)
    # name of the left side missing on the right
    assert not env_preceq({"S": BOT}, {})


envs = st.dictionaries(st.sampled_from("abcd"), st.sampled_from(V), max_size=4)


@given(envs, envs, envs)
def test_env_preceq_partial_order_and_monotonic_join(a, b, c):
    assert env_preceq(a, env_join(a, b))
    if env_preceq(a, b) and env_preceq(b, a):
        aligned = set(a) | set(b)
        assert all(a.get(s, BOT) == b.get(s, BOT) for s in aligned)
    if env_preceq(a, b) and env_preceq(b, c):
        assert env_preceq(a, c)
    if env_preceq(a, b):
        assert env_preceq(env_join(a, c), env_join(b, c))


@given(envs, envs)
def test_env_ops_match_pointwise_tables(a, b):
    j = env_join(a, b)
    m = env_meet(a, b)
    for s in set(a) | set(b):
        assert j[s] == xi_join(a.get(s, BOT), b.get(s, BOT))
        assert m[s] == xi_meet(a.get(s, BOT), b.get(s, BOT))
    n = env_not(a)
    assert all(n[s] == xi_not(a[s]) for s in a)

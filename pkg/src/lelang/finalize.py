"""Finalization: close the control pair, decide every input, simplify, export.

Closing gives an open unit its boot register (control asserted exactly once,
reinit never).  Finalization then forces every input's decided bit, collapses
the combinational network into canonical functions of inputs and latches,
replaces wires that are constant on all reachable states (proved by
one-step induction over the latch transition functions), sweeps what nothing
observes, and recomputes the dates of the flattened system.  None of this
changes any simulation result from the initial state.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bdd import Bdd, BddBudget, FALSE as BDD_F, TRUE as BDD_T
from .bexpr import BConst, BRef, BoolExpr, TRUE, atoms, substitute
from .errors import LecError
from .lower import BooleanSystem, Latch
from .schedule import Schedule, evaluation_order, extend_sort, sort_system


def close_system(sys: BooleanSystem, sched: Schedule) -> tuple[BooleanSystem, Schedule]:
    """Drive the reserved control pair: asserted at the first instant only."""
    if "_set" not in sys.inputs:
        return sys, sched
    out = sys.copy()
    out.inputs = tuple(s for s in out.inputs if s not in ("_set", "_reset", "_kill"))
    out.define("_set_def", TRUE)
    out.define("_set_val", BRef("_boot"))
    out.define("_reset_def", TRUE)
    out.define("_reset_val", BConst(False))
    out.define("_kill_def", TRUE)
    out.define("_kill_val", BConst(False))
    out.define("_boot$nxt", BConst(False))
    out.latches.append(Latch("_boot", True, "_boot$nxt"))
    sched2, _ = extend_sort(out, dict(sched.early), dict(sched.late))
    return out, sched2


@dataclass
class FinalizedSystem:
    system: BooleanSystem
    schedule: Schedule
    invariants: tuple[str, ...] = ()  # wires proved constant over reachable states
    collapsed: bool = True


def _variable_order(sys: BooleanSystem) -> list[str]:
    order = []
    for s in sys.inputs:
        order.append(f"{s}_val")
    for latch in sorted(sys.latches, key=lambda l: l.name):
        order.append(latch.name)
    return order


def _roots(sys: BooleanSystem) -> list[str]:
    roots = []
    for s in sys.outputs:
        roots.extend(sys.signal_pair(s))
    if "err$all_val" in sys.equations:
        roots.extend(("err$all_def", "err$all_val"))
    for s in sys.inputs:
        cd, cv = sys.read_pair(s)
        if cd in sys.equations:
            roots.extend((cd, cv))
    for latch in sys.latches:
        roots.append(latch.next_wire)
    return [r for r in dict.fromkeys(roots) if r in sys.equations]


def finalize(sys: BooleanSystem, sched: Schedule, *,
             sequential_constants: bool = True,
             max_nodes: int = 1_000_000,
             collapse_limit: int = 28) -> FinalizedSystem:
    """Force input decisions and simplify.

    Small systems collapse into canonical two-level functions of inputs and
    latches, with constants over the reachable states substituted.  Larger
    ones keep their structural equations (canonical flattening grows
    exponentially in the worst case) and only force the decided bits, fold,
    and sweep; behavior is identical either way.
    """
    sys, sched = close_system(sys, sched)
    forced = {f"{s}_def" for s in sys.inputs}

    if len(sys.latches) + len(sys.inputs) <= collapse_limit:
        try:
            return _finalize_collapsed(sys, sched, forced, sequential_constants,
                                       max_nodes)
        except BddBudget:
            pass
    return _finalize_fallback(sys, sched, forced)


def _finalize_collapsed(sys: BooleanSystem, sched: Schedule, forced: set[str],
                        sequential_constants: bool, max_nodes: int) -> FinalizedSystem:
    order = evaluation_order(sched)
    invariants: list[str] = []
    constant_wires: dict[str, bool] = {}

    def collapse() -> tuple[Bdd, dict[str, int]]:
        bdd = Bdd(_variable_order(sys), max_nodes=max_nodes)
        fn: dict[str, int] = {}

        def leaf(wire: str) -> int:
            if wire in fn:
                return fn[wire]
            if wire in forced:
                return BDD_T
            return bdd.atom(wire)  # input value bit or latch

        for wire in order:
            if wire in constant_wires:
                fn[wire] = BDD_T if constant_wires[wire] else BDD_F
            else:
                fn[wire] = _expr_to_bdd(bdd, sys.equations[wire], leaf)
        return bdd, fn

    bdd, fn = collapse()
    if sequential_constants and sys.latches:
        # wires constant on every reachable state fold into their readers;
        # folding can expose further constants, so iterate to a fixpoint
        for _ in range(4):
            inv = _inductive_invariant(bdd, sys, fn)
            new = 0
            for wire in fn:
                if wire in constant_wires or fn[wire] in (BDD_T, BDD_F):
                    continue
                if bdd.implies_check(inv, fn[wire]):
                    constant_wires[wire] = True
                elif bdd.implies_check(inv, bdd.neg(fn[wire])):
                    constant_wires[wire] = False
                else:
                    continue
                invariants.append(wire)
                new += 1
            if not new:
                break
            bdd, fn = collapse()

    out = BooleanSystem(sys.name, sys.inputs, sys.outputs)
    for root in _roots(sys):
        out.define(root, bdd.to_expr(fn[root]))

    # keep latches read by an observable equation, transitively via next state
    next_of = {l.name: l.next_wire for l in sys.latches}
    latch_names = set(next_of)

    def latch_refs(wire: str) -> set[str]:
        return {a.wire for a in atoms(out.equations[wire])} & latch_names

    work = set()
    for wire in out.equations:
        if wire not in set(next_of.values()):
            work |= latch_refs(wire)
    live: set[str] = set()
    while work:
        name = work.pop()
        if name in live:
            continue
        live.add(name)
        work |= latch_refs(next_of[name])
    for latch in sys.latches:
        if latch.name not in live:
            out.equations.pop(latch.next_wire, None)
    out.latches = [l for l in sys.latches if l.name in live]
    sched2 = sort_system(out)
    return FinalizedSystem(out, sched2, tuple(sorted(invariants)), collapsed=True)


def _expr_to_bdd(bdd: Bdd, expr: BoolExpr, leaf) -> int:
    from .bexpr import BAnd, BNot, BOr
    match expr:
        case BConst(v):
            return BDD_T if v else BDD_F
        case BRef(w):
            return leaf(w)
        case BNot(a):
            return bdd.neg(_expr_to_bdd(bdd, a, leaf))
        case BAnd(args):
            acc = BDD_T
            for a in args:
                acc = bdd.conj(acc, _expr_to_bdd(bdd, a, leaf))
            return acc
        case BOr(args):
            acc = BDD_F
            for a in args:
                acc = bdd.disj(acc, _expr_to_bdd(bdd, a, leaf))
            return acc
    raise TypeError(expr)


def _inductive_invariant(bdd: Bdd, sys: BooleanSystem, fn: dict[str, int]) -> int:
    """Conjunction of wire functions that hold initially and are preserved
    by every transition; proved with a drop-until-stable induction loop."""
    latch_vars = {l.name: bdd.index[l.name] for l in sys.latches}
    next_fn = {latch_vars[l.name]: fn[l.next_wire] for l in sys.latches}
    init = {l.name: l.init for l in sys.latches}

    candidates = []
    seen = set()
    for wire in sorted(fn):
        f = fn[wire]
        if f in (BDD_T, BDD_F) or f in seen:
            continue
        if not bdd.support(f) <= latch_vars.keys():
            continue
        if bdd.eval(f, init):
            seen.add(f)
            candidates.append(f)

    while True:
        if not candidates:
            return BDD_T
        inv = BDD_T
        for f in candidates:
            inv = bdd.conj(inv, f)
        survivors = []
        for f in candidates:
            f_next = bdd.compose(f, next_fn)
            if bdd.implies_check(inv, f_next):
                survivors.append(f)
        if len(survivors) == len(candidates):
            return inv
        candidates = survivors


def _finalize_fallback(sys: BooleanSystem, sched: Schedule,
                       forced: set[str]) -> FinalizedSystem:
    substituted: dict[str, BoolExpr] = {}

    def leaf(atom):
        if isinstance(atom, BRef) and atom.wire in forced:
            return TRUE
        return atom

    for wire, expr in sys.equations.items():
        substituted[wire] = substitute(expr, leaf)

    # sweep anything the observable roots never read
    next_of = {l.name: l.next_wire for l in sys.latches}
    keep_wires: set[str] = set()
    keep_latches: set[str] = set()
    work = [r for r in _roots(sys) if r not in set(next_of.values())]
    while work:
        wire = work.pop()
        if wire in keep_wires or wire in keep_latches:
            continue
        if wire in substituted:
            keep_wires.add(wire)
            work.extend(a.wire for a in atoms(substituted[wire]))
        elif wire in next_of:
            keep_latches.add(wire)
            work.append(next_of[wire])

    out = BooleanSystem(sys.name, sys.inputs, sys.outputs,
                        [l for l in sys.latches if l.name in keep_latches])
    for wire, expr in substituted.items():
        if wire in keep_wires:
            out.define(wire, expr)
    return FinalizedSystem(out, sort_system(out), (), collapsed=False)


def verify_decided_outputs(fin: FinalizedSystem,
                           max_nodes: int = 2_000_000) -> list[str]:
    """Outputs whose decided bit is NOT constant true over the reachable states.

    Checks each user output's def wire against the canonical collapse plus the
    inductive register invariant, without rebuilding any equation text.
    """
    sys, sched = fin.system, fin.schedule
    bdd = Bdd(_variable_order(sys), max_nodes=max_nodes)
    fn: dict[str, int] = {}

    def leaf(wire: str) -> int:
        if wire in fn:
            return fn[wire]
        return bdd.atom(wire)

    for wire in evaluation_order(sched):
        fn[wire] = _expr_to_bdd(bdd, sys.equations[wire], leaf)
    inv = _inductive_invariant(bdd, sys, fn) if sys.latches else BDD_T
    failures = []
    for s in sys.outputs:
        if s.startswith("_"):
            continue
        d = fn.get(f"{s}_def")
        if d is None or not bdd.implies_check(inv, d):
            failures.append(s)
    return failures


# --- BLIF export -----------------------------------------------------------------

def export_blif(fin: FinalizedSystem | BooleanSystem,
                sched: Schedule | None = None) -> str:
    """Standard netlist text with single-output sum-of-products covers."""
    sys = fin.system if isinstance(fin, FinalizedSystem) else fin
    sched = sched or (fin.schedule if isinstance(fin, FinalizedSystem) else sort_system(sys))
    lines = [f".model {sys.name}"]
    in_wires = [f"{s}_val" for s in sys.inputs]
    if in_wires:
        lines.append(".inputs " + " ".join(in_wires))
    out_wires = []
    for s in sys.outputs:
        out_wires.extend([w for w in sys.signal_pair(s) if w in sys.equations])
    if out_wires:
        lines.append(".outputs " + " ".join(out_wires))
    for latch in sorted(sys.latches, key=lambda l: l.name):
        lines.append(f".latch {latch.next_wire} {latch.name} {int(latch.init)}")
    for wire in sorted(sys.equations, key=lambda w: (sched.early[w], w)):
        lines.extend(_names_cover(wire, sys.equations[wire]))
    lines.append(".end")
    return "\n".join(lines) + "\n"


def _names_cover(wire: str, expr: BoolExpr) -> list[str]:
    support = sorted({a.wire for a in atoms(expr)})
    bdd = Bdd(support)
    f = bdd.build(expr)
    head = ".names " + " ".join(support + [wire])
    if f == BDD_T:
        return [".names " + wire, "1"]
    if f == BDD_F:
        return [".names " + wire]
    rows = []
    for cube in bdd.cubes(f):
        pattern = "".join(
            "-" if v not in cube else ("1" if cube[v] else "0") for v in support)
        rows.append(pattern + " 1")
    return [head] + rows


def read_blif(text: str) -> BooleanSystem:
    """Reader for the exporter's own dialect, used to validate round trips."""
    from .bexpr import band, bnot, bor
    name = None
    inputs: list[str] = []
    outputs: list[str] = []
    latches: list[Latch] = []
    covers: dict[str, tuple[list[str], list[str]]] = {}
    current: tuple[list[str], str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == ".model":
            name = fields[1]
            current = None
        elif fields[0] == ".inputs":
            inputs.extend(fields[1:])
            current = None
        elif fields[0] == ".outputs":
            outputs.extend(fields[1:])
            current = None
        elif fields[0] == ".latch":
            if len(fields) < 4:
                raise LecError("malformed .latch", lineno)
            latches.append(Latch(fields[2], fields[3] == "1", fields[1]))
            current = None
        elif fields[0] == ".names":
            wire = fields[-1]
            covers[wire] = (fields[1:-1], [])
            current = (fields[1:-1], wire)
        elif fields[0] == ".end":
            current = None
        elif current is not None:
            covers[current[1]][1].append(line)
        else:
            raise LecError(f"unexpected line {line!r}", lineno)
    if name is None:
        raise LecError("missing .model", None)
    sys = BooleanSystem(name, tuple(i[:-4] if i.endswith("_val") else i for i in inputs),
                        tuple(dict.fromkeys(w.rsplit("_", 1)[0] for w in outputs)),
                        latches)
    for wire, (support, rows) in covers.items():
        terms = []
        for row in rows:
            if not support:
                if row.strip() == "1":
                    terms.append(TRUE)
                continue
            pattern, value = row.split()
            if value != "1":
                raise LecError("only on-set covers are produced", None)
            lits = []
            for ch, var in zip(pattern, support):
                if ch == "1":
                    lits.append(BRef(var))
                elif ch == "0":
                    lits.append(bnot(BRef(var)))
            terms.append(band(*lits))
        sys.define(wire, bor(*terms) if terms else BConst(False))
    return sys

"""Dependency forest, evaluation dates, and incremental linking.

Each defined wire gets an early date (first level at which it can be
evaluated: the longest chain of defined wires below it) and a late date (last
level at which it must be: one below the minimum over its consumers, its own
early date when nothing consumes it).  Free sources: input pairs, latches and
constants.  Equations sharing a level are independent, so any order inside a
level is valid.

Linking two sorted systems merges equations that define the same signal and
repairs dates by relaxation outward from the boundary, instead of sorting the
union from scratch; the number of date recomputations is reported so callers
can observe that untouched regions stay untouched.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .bexpr import BRef, BoolExpr, TRUE, atoms, band, bnot, bor, substitute
from .circuit import toposort
from .errors import CausalityCycle
from .lower import BooleanSystem, Latch
from .xi import InternalFault

RESERVED_MERGE_AND = ("_rtl",)


@dataclass
class DepGraph:
    upstream: dict[str, set[str]] = field(default_factory=dict)
    downstream: dict[str, set[str]] = field(default_factory=dict)


def build_dependencies(sys: BooleanSystem) -> DepGraph:
    """Per defined wire: which defined wires it reads, and which read it.

    A latch cuts the graph: its current value is a free source and its next
    expression is an ordinary sink equation.
    """
    g = DepGraph()
    defined = set(sys.equations)
    for wire in sys.equations:
        g.upstream[wire] = set()
        g.downstream.setdefault(wire, set())
    for wire, expr in sys.equations.items():
        for a in atoms(expr):
            if a.wire in defined:
                g.upstream[wire].add(a.wire)
                g.downstream.setdefault(a.wire, set()).add(wire)
    return g


@dataclass
class Schedule:
    early: dict[str, int]
    late: dict[str, int]

    def levels(self) -> list[list[str]]:
        out: dict[int, list[str]] = {}
        for wire, lv in self.early.items():
            out.setdefault(lv, []).append(wire)
        return [sorted(out[k]) for k in sorted(out)]

    def depth(self) -> int:
        return max(self.early.values(), default=-1) + 1


def propagate_dates(g: DepGraph) -> Schedule:
    """Longest-path early dates forward, late dates backward; rejects cycles."""
    order = toposort({w: set(g.upstream[w]) for w in g.upstream})
    early: dict[str, int] = {}
    for w in order:
        ups = g.upstream[w]
        early[w] = max((early[u] + 1 for u in ups), default=0)
    late: dict[str, int] = {}
    for w in reversed(order):
        downs = g.downstream.get(w, ())
        late[w] = min((late[d] - 1 for d in downs), default=early[w])
    return Schedule(early, late)


def evaluation_order(s: Schedule) -> list[str]:
    """Ascending early date, names breaking ties for reproducibility."""
    return sorted(s.early, key=lambda w: (s.early[w], w))


class DateConsistencyError(Exception):
    pass


def check_schedule(sys: BooleanSystem, s: Schedule) -> None:
    """Validate the date invariants against the system's dependencies."""
    g = build_dependencies(sys)
    for wire in sys.equations:
        if wire not in s.early or wire not in s.late:
            raise DateConsistencyError(f"no dates recorded for {wire}")
        for up in g.upstream[wire]:
            if s.early[wire] < s.early[up] + 1:
                raise DateConsistencyError(
                    f"{wire} (early {s.early[wire]}) depends on {up} "
                    f"(early {s.early[up]}) but is not scheduled after it")
        if s.early[wire] > s.late[wire]:
            raise DateConsistencyError(
                f"{wire}: early {s.early[wire]} exceeds late {s.late[wire]}")


# --- linking -------------------------------------------------------------------


def _xi_join_pair(a: tuple[BoolExpr, BoolExpr],
                  b: tuple[BoolExpr, BoolExpr]) -> tuple[BoolExpr, BoolExpr]:
    (ld, lv), (rd, rv) = a, b
    same = bor(band(lv, rv), band(bnot(lv), bnot(rv)))
    d = bor(band(ld, bnot(rd), bnot(rv)),
            band(rd, bnot(ld), bnot(lv)),
            band(ld, rd, same))
    return d, bor(lv, rv)


def _kor_pair(a, b):
    (ld, lv), (rd, rv) = a, b
    d = bor(band(ld, lv), band(rd, rv), band(ld, bnot(lv), rd, bnot(rv)))
    return d, bor(lv, rv)


def _kand_pair(a, b):
    (ld, lv), (rd, rv) = a, b
    d = bor(band(ld, bnot(lv)), band(rd, bnot(rv)), band(ld, lv, rd, rv))
    return d, band(lv, rv)


@dataclass
class LinkResult:
    system: BooleanSystem
    schedule: Schedule
    touched: int  # wires whose dates were recomputed during repair


def link(a: tuple[BooleanSystem, Schedule],
         b: tuple[BooleanSystem, Schedule]) -> LinkResult:
    """Merge two sorted systems and repair evaluation dates incrementally.

    Signals defined by both sides merge: signal status joins, reporting pairs
    combine by three-valued or, ready-to-leave by three-valued and, error
    flags by disjunction.  Wires of the second system that collide with the
    first are renamed under a `$2` suffix (the first side's under `$1` when a
    merge replaces them).
    """
    sys_a, sched_a = a
    sys_b, sched_b = b

    defined_a = set(sys_a.equations) | sys_a.latch_names()
    defined_b = set(sys_b.equations) | sys_b.latch_names()

    shared_signals = [s for s in sys_a.outputs
                      if s in sys_b.outputs and f"{s}_def" in sys_a.equations
                      and f"{s}_def" in sys_b.equations]
    special: dict[str, str] = {}  # merged wire -> merge kind
    for s in shared_signals:
        kind = "kand" if s in RESERVED_MERGE_AND else "kor"
        special[f"{s}_def"] = kind
        special[f"{s}_val"] = kind
        if f"{s}$cur_def" in sys_a.equations and f"{s}$cur_def" in sys_b.equations:
            special[f"{s}$cur_def"] = "join"
            special[f"{s}$cur_val"] = "join"
    if "err$all_val" in sys_a.equations and "err$all_val" in sys_b.equations:
        special["err$all_def"] = "or"
        special["err$all_val"] = "or"

    def renamer(defs: set[str], suffix: str, other_defs: set[str]):
        table = {}
        for w in defs:
            if w in special:
                table[w] = w + suffix
            elif suffix == "$2" and w in other_defs:
                table[w] = w + suffix
        return table

    ren_a = renamer(defined_a, "$1", defined_b)
    ren_b = renamer(defined_b, "$2", defined_a)

    def rewrite(expr: BoolExpr, table: dict[str, str]):
        def leaf(atom):
            assert isinstance(atom, BRef)
            w = atom.wire
            if w in special:
                return BRef(w)  # reads go to the merged wire
            if w in table:
                return BRef(table[w])
            return atom
        return substitute(expr, leaf)

    defined_signals = {s for s in itertools.chain(sys_a.outputs, sys_b.outputs)
                       if f"{s}_def" in sys_a.equations or f"{s}_def" in sys_b.equations}
    merged = BooleanSystem(
        f"{sys_a.name}+{sys_b.name}",
        tuple(dict.fromkeys(
            s for s in itertools.chain(sys_a.inputs, sys_b.inputs)
            if s not in defined_signals)),
        tuple(dict.fromkeys(itertools.chain(sys_a.outputs, sys_b.outputs))),
    )

    early: dict[str, int] = {}
    late: dict[str, int] = {}
    for sys_x, sched_x, table in ((sys_a, sched_a, ren_a), (sys_b, sched_b, ren_b)):
        for wire, expr in sys_x.equations.items():
            new_name = table.get(wire, wire)
            merged.define(new_name, rewrite(expr, table))
            early[new_name] = sched_x.early[wire]
            late[new_name] = sched_x.late[wire]
        for latch in sys_x.latches:
            merged.latches.append(Latch(table.get(latch.name, latch.name), latch.init,
                                        table.get(latch.next_wire, latch.next_wire)))

    seeds: set[str] = set()
    done = set()
    for wire, kind in sorted(special.items()):
        stem, part = wire.rsplit("_", 1)
        if stem in done:
            continue
        done.add(stem)
        pair_a = (BRef(f"{stem}_def$1"), BRef(f"{stem}_val$1"))
        pair_b = (BRef(f"{stem}_def$2"), BRef(f"{stem}_val$2"))
        if kind == "join":
            d, v = _xi_join_pair(pair_a, pair_b)
        elif kind == "kor":
            d, v = _kor_pair(pair_a, pair_b)
        elif kind == "kand":
            d, v = _kand_pair(pair_a, pair_b)
        else:  # 'or'
            d, v = TRUE, bor(pair_a[1], pair_b[1])
        merged.define(f"{stem}_def", d)
        merged.define(f"{stem}_val", v)
        seeds.add(f"{stem}_def")
        seeds.add(f"{stem}_val")

    # wires whose free references just became bound gain upstream edges,
    # and the wires they now read gain consumers (late dates may tighten)
    gained_consumers: set[str] = set()
    for sys_x, table, own_defined in ((sys_a, ren_a, defined_a),
                                      (sys_b, ren_b, defined_b)):
        for wire, expr in sys_x.equations.items():
            for atom in atoms(expr):
                w = atom.wire
                if w in special:
                    seeds.add(table.get(wire, wire))
                elif w not in own_defined and w in merged.equations:
                    seeds.add(table.get(wire, wire))
                    gained_consumers.add(w)

    graph = build_dependencies(merged)
    _check_acyclic_after_merge(graph)
    touched = _repair_dates(graph, early, late, seeds, gained_consumers)
    return LinkResult(merged, Schedule(early, late), touched)


def _check_acyclic_after_merge(graph: DepGraph) -> None:
    toposort({w: set(graph.upstream[w]) for w in graph.upstream})


def _closure(start: set[str], edges: dict[str, set[str]]) -> set[str]:
    out = set(start)
    work = list(start)
    while work:
        node = work.pop()
        for nxt in edges.get(node, ()):
            if nxt not in out:
                out.add(nxt)
                work.append(nxt)
    return out


def _repair_dates(graph: DepGraph, early: dict[str, int], late: dict[str, int],
                  seeds: set[str], gained_consumers: set[str] = frozenset()) -> int:
    """Recompute dates in the regions reachable from the seeds, once each.

    Early dates are repaired forward (downstream of the seeds), late dates
    backward (upstream of anything whose early moved, of the seeds, and of
    wires that gained consumers).  Everything else keeps its recorded dates.
    """
    order = toposort({w: set(graph.upstream[w]) for w in graph.upstream})
    position = {w: i for i, w in enumerate(order)}
    touched: set[str] = set()

    forward = _closure(seeds, graph.downstream)
    changed_early: set[str] = set()
    late_roots = set(seeds) | set(gained_consumers)
    for wire in sorted(forward, key=position.get):
        if wire not in seeds and not (graph.upstream[wire] & changed_early):
            continue
        touched.add(wire)
        value = max((early.get(u, 0) + 1 for u in graph.upstream[wire]), default=0)
        if early.get(wire) != value:
            early[wire] = value
            changed_early.add(wire)
            late_roots.add(wire)

    backward = _closure(late_roots, graph.upstream)
    changed_late: set[str] = set()
    for wire in sorted(backward, key=position.get, reverse=True):
        if wire not in late_roots and not (graph.downstream.get(wire, set()) & changed_late):
            continue
        touched.add(wire)
        downs = [d for d in graph.downstream.get(wire, ()) if d in late]
        value = min((late[d] - 1 for d in downs), default=early[wire])
        if late.get(wire) != value:
            late[wire] = value
            changed_late.add(wire)
    return len(touched)


def sort_system(sys: BooleanSystem) -> Schedule:
    """From-scratch dates for a system."""
    return propagate_dates(build_dependencies(sys))


def extend_sort(sys: BooleanSystem, early: dict[str, int],
                late: dict[str, int]) -> tuple[Schedule, int]:
    """Complete preset dates over a grown system, touching only what changed.

    Wires without preset dates, and preset wires whose dependencies include
    such wires, are relaxed; everything else keeps its dates.
    """
    graph = build_dependencies(sys)
    _check_acyclic_after_merge(graph)
    seeds = {w for w in sys.equations
             if w not in early or any(u not in early for u in graph.upstream[w])}
    gained = {u for w in seeds for u in graph.upstream[w] if u in early}
    touched = _repair_dates(graph, early, late, seeds, gained)
    return Schedule(early, late), touched

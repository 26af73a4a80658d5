"""Reduced ordered binary decision diagrams.

Canonical representation for the finalizer: equality is node identity under a
fixed variable order.  Supports the usual apply operations, composition
(substituting functions for variables), and deterministic cube enumeration
for sum-of-products output.
"""

from __future__ import annotations

from .bexpr import BAnd, BConst, BNot, BOr, BRef, BoolExpr, bor, band, bnot

FALSE = 0
TRUE = 1


class BddBudget(Exception):
    """Node budget exhausted; callers fall back to structural forms."""


class Bdd:
    def __init__(self, order: list[str], max_nodes: int = 2_000_000):
        self.order = list(order)
        self.index = {v: i for i, v in enumerate(self.order)}
        # nodes[id] = (var_index, low, high); ids 0/1 are terminals
        self.nodes: list[tuple[int, int, int]] = [(-1, 0, 0), (-1, 1, 1)]
        self.unique: dict[tuple[int, int, int], int] = {}
        self.cache: dict = {}
        self.max_nodes = max_nodes

    def var_count(self) -> int:
        return len(self.order)

    def add_var(self, name: str) -> int:
        if name not in self.index:
            self.index[name] = len(self.order)
            self.order.append(name)
        return self.index[name]

    def mk(self, var: int, low: int, high: int) -> int:
        if low == high:
            return low
        key = (var, low, high)
        found = self.unique.get(key)
        if found is not None:
            return found
        if len(self.nodes) >= self.max_nodes:
            raise BddBudget(f"more than {self.max_nodes} nodes")
        self.nodes.append(key)
        node = len(self.nodes) - 1
        self.unique[key] = node
        return node

    def atom(self, name: str) -> int:
        return self.mk(self.add_var(name), FALSE, TRUE)

    def top(self, f: int) -> int:
        return self.nodes[f][0]

    def cofactors(self, f: int, var: int) -> tuple[int, int]:
        v, lo, hi = self.nodes[f]
        if f < 2 or v > var:
            return f, f
        assert v == var
        return lo, hi

    def ite(self, f: int, g: int, h: int) -> int:
        if f == TRUE:
            return g
        if f == FALSE:
            return h
        if g == h:
            return g
        if g == TRUE and h == FALSE:
            return f
        key = ("ite", f, g, h)
        found = self.cache.get(key)
        if found is not None:
            return found
        var = min(v for v in (self.top(f), self.top(g), self.top(h)) if v >= 0)
        f0, f1 = self.cofactors(f, var)
        g0, g1 = self.cofactors(g, var)
        h0, h1 = self.cofactors(h, var)
        out = self.mk(var, self.ite(f0, g0, h0), self.ite(f1, g1, h1))
        self.cache[key] = out
        return out

    def neg(self, f: int) -> int:
        return self.ite(f, FALSE, TRUE)

    def conj(self, f: int, g: int) -> int:
        return self.ite(f, g, FALSE)

    def disj(self, f: int, g: int) -> int:
        return self.ite(f, TRUE, g)

    def implies_check(self, f: int, g: int) -> bool:
        return self.ite(f, g, TRUE) == TRUE

    def build(self, expr: BoolExpr) -> int:
        match expr:
            case BConst(v):
                return TRUE if v else FALSE
            case BRef(w):
                return self.atom(w)
            case BNot(a):
                return self.neg(self.build(a))
            case BAnd(args):
                out = TRUE
                for a in args:
                    out = self.conj(out, self.build(a))
                return out
            case BOr(args):
                out = FALSE
                for a in args:
                    out = self.disj(out, self.build(a))
                return out
        raise TypeError(expr)

    def compose(self, f: int, substitution: dict[int, int]) -> int:
        """Substitute, per variable index, a function for the variable."""
        if f < 2:
            return f
        key = ("comp", f, tuple(sorted(substitution.items())))
        found = self.cache.get(key)
        if found is not None:
            return found
        var, lo, hi = self.nodes[f]
        lo2 = self.compose(lo, substitution)
        hi2 = self.compose(hi, substitution)
        branch = substitution.get(var)
        if branch is None:
            branch = self.mk(var, FALSE, TRUE)
        out = self.ite(branch, hi2, lo2)
        self.cache[key] = out
        return out

    def eval(self, f: int, assignment: dict[str, bool]) -> bool:
        while f >= 2:
            var, lo, hi = self.nodes[f]
            f = hi if assignment.get(self.order[var], False) else lo
        return f == TRUE

    def support(self, f: int) -> set[str]:
        seen: set[int] = set()
        out: set[str] = set()
        stack = [f]
        while stack:
            n = stack.pop()
            if n < 2 or n in seen:
                continue
            seen.add(n)
            var, lo, hi = self.nodes[n]
            out.add(self.order[var])
            stack.extend((lo, hi))
        return out

    def cubes(self, f: int) -> list[dict[str, bool]]:
        """Deterministic enumeration of the paths to the true terminal."""
        out: list[dict[str, bool]] = []

        def walk(n: int, acc: dict[str, bool]):
            if n == FALSE:
                return
            if n == TRUE:
                out.append(dict(acc))
                return
            var, lo, hi = self.nodes[n]
            name = self.order[var]
            acc[name] = False
            walk(lo, acc)
            acc[name] = True
            walk(hi, acc)
            del acc[name]

        walk(f, {})
        return out

    def to_expr(self, f: int) -> BoolExpr:
        """Canonical sum of cubes (complement-reduced when smaller)."""
        if f == TRUE:
            return BConst(True)
        if f == FALSE:
            return BConst(False)
        pos = self.cubes(f)
        neg = self.cubes(self.neg(f))
        use_neg = len(neg) < len(pos)
        cubes = neg if use_neg else pos
        terms = []
        for cube in cubes:
            lits = [BRef(v) if val else bnot(BRef(v))
                    for v, val in sorted(cube.items(), key=lambda kv: self.index[kv[0]])]
            terms.append(band(*lits))
        expr = bor(*terms)
        return bnot(expr) if use_neg else expr

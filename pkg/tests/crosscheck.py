"""Shared harness: random well-formed programs and oracle-vs-circuit agreement.

The two semantics must agree, per instant, on the set of emitted outputs and
on the termination bit.  Contradictory statuses abort a trace on both sides;
the harness checks both flag them together.  Programs whose compilation
reports a causality cycle are skipped (the reference interpreter tolerates
more programs than the constructive translation accepts).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from lelang import ast
from lelang.behavioral import Interpreter, react
from lelang.compiler import compile_resolved
from lelang.errors import CausalityCycle
from lelang.finalize import close_system
from lelang.checks import check_static, errors
from lelang.resolve import resolve_runs
from lelang.simulate import Simulator
from lelang.xi import BOT, ONE, ZERO, Environment, Xi


@dataclass
class GenConfig:
    max_depth: int = 6
    max_trace: int = 8
    bottom_rate: float = 0.1
    allow_halt: bool = True


@dataclass
class Mismatch:
    module: ast.Module
    instant: int
    field: str
    oracle: object
    circuit: object
    trace: list[Environment]

    def __str__(self):
        return (f"disagreement at t={self.instant} on {self.field}: "
                f"oracle={self.oracle} circuit={self.circuit}\n"
                f"inputs: {self.trace}\n{ast.module_text(self.module)}")


def random_module(rng: random.Random, cfg: GenConfig = GenConfig()) -> ast.Module:
    n_in = rng.choice((1, 2))
    n_out = rng.choice((1, 2))
    inputs = tuple(f"I{k}" for k in range(n_in))
    outputs = tuple(f"O{k}" for k in range(n_out))
    local_budget = [1 if rng.random() < 0.5 and n_in + n_out < 4 else 0]
    scope = list(inputs + outputs)

    def expr(depth: int) -> ast.SigExpr:
        if depth <= 0 or rng.random() < 0.6:
            return ast.Sig(rng.choice(scope))
        k = rng.random()
        if k < 0.4:
            return ast.Not(expr(depth - 1))
        if k < 0.7:
            return ast.And(expr(depth - 1), expr(depth - 1))
        return ast.Or(expr(depth - 1), expr(depth - 1))

    def leaf() -> ast.Statement:
        k = rng.random()
        if k < 0.30:
            return ast.Emit(rng.choice(scope))
        if k < 0.55:
            return ast.Wait(rng.choice(scope))
        if k < 0.80:
            return ast.Pause()
        if k < 0.90:
            return ast.Nothing()
        if cfg.allow_halt:
            return ast.Halt()
        return ast.Pause()

    def stmt(depth: int) -> ast.Statement:
        if depth <= 1 or rng.random() < 0.25:
            return leaf()
        k = rng.random()
        if k < 0.28:
            return ast.Seq(stmt(depth - 1), stmt(depth - 1))
        if k < 0.46:
            return ast.Par(stmt(depth - 1), stmt(depth - 1))
        if k < 0.70:
            return ast.Present(expr(2), stmt(depth - 1), stmt(depth - 1))
        if k < 0.82:
            return ast.Abort(stmt(depth - 1), rng.choice(scope))
        if k < 0.92:
            body = stmt(depth - 1)
            if ast.possibly_instantaneous(body):
                body = ast.Seq(body, ast.Pause())
            return ast.Loop(body)
        if local_budget[0] > 0:
            local_budget[0] -= 1
            name = f"L{local_budget[0]}"
            scope.append(name)
            inner = stmt(depth - 1)
            scope.remove(name)
            return ast.Local((name,), inner)
        return ast.Seq(stmt(depth - 1), stmt(depth - 1))

    body = stmt(rng.randint(2, cfg.max_depth))
    return ast.Module("Gen", inputs, outputs, (), body)


def random_inputs(rng: random.Random, module: ast.Module,
                  cfg: GenConfig = GenConfig()) -> list[Environment]:
    length = rng.randint(1, cfg.max_trace)
    seq = []
    for _ in range(length):
        env: Environment = {}
        for sig in module.inputs:
            r = rng.random()
            if r < cfg.bottom_rate:
                env[sig] = BOT
            elif r < cfg.bottom_rate + (1 - cfg.bottom_rate) / 2:
                env[sig] = ZERO
            else:
                env[sig] = ONE
        seq.append(env)
    return seq


def compare_module(module: ast.Module,
                   input_seq: list[Environment]) -> Mismatch | None:
    """Run both semantics over one input sequence; None means they agree."""
    resolved = resolve_runs(module)
    if errors(resolved.diagnostics):
        raise ValueError(f"generated module fails checks: {resolved.diagnostics}")
    unit = compile_resolved(resolved)
    closed, sched = close_system(unit.system, unit.schedule)
    sim = Simulator(closed, sched)
    oracle = Interpreter(resolved)

    state = sim.initial_state()
    term = oracle.translation.term
    for t, inputs in enumerate(input_seq):
        reaction = react(term, inputs, oracle.translation.signals,
                         oracle.translation.locals)
        result, state = sim.step(state, inputs)
        beh_error = reaction.error
        cir_error = result.error is not None
        if beh_error or cir_error:
            if beh_error != cir_error:
                return Mismatch(module, t, "error flag", beh_error, cir_error,
                                input_seq)
            return None  # both sides report the contradiction; trace ends here
        beh_emitted = {o for o in module.outputs if reaction.out.get(o) == ONE}
        cir_emitted = result.present_outputs()
        if beh_emitted != cir_emitted:
            return Mismatch(module, t, "emitted outputs", sorted(beh_emitted),
                            sorted(cir_emitted), input_seq)
        if reaction.term != result.rtl:
            return Mismatch(module, t, "termination", reaction.term, result.rtl,
                            input_seq)
        if reaction.term:
            break  # program over; reactions beyond termination are meaningless
        term = reaction.next
    return None


@dataclass
class SweepStats:
    compared: int = 0
    cyclic: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)


def sweep(programs: int, seed: int = 20240, cfg: GenConfig = GenConfig(),
          traces_per_program: int = 2, stop_at: int = 5) -> SweepStats:
    stats = SweepStats()
    rng = random.Random(seed)
    while stats.compared < programs:
        module = random_module(rng, cfg)
        try:
            for _ in range(traces_per_program):
                mismatch = compare_module(module, random_inputs(rng, module, cfg))
                if mismatch is not None:
                    stats.mismatches.append(mismatch)
                    if len(stats.mismatches) >= stop_at:
                        return stats
            stats.compared += 1
        except CausalityCycle:
            stats.cyclic += 1
    return stats

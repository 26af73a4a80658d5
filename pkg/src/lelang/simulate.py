"""Levelized tick-by-tick execution of sorted systems.

A simulator owns a closed system (control driven by its boot register) and
evaluates its equations in schedule order once per instant.  Inputs arrive as
per-signal statuses; unknown is only meaningful before finalization.  A step
reports each output's status, the ready-to-leave bit, the register snapshot,
and a diagnostic when any signal resolves to the contradictory status.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bexpr import BRef, eval_bool
from .lower import BooleanSystem
from .schedule import Schedule, evaluation_order, sort_system
from .xi import BOT, ONE, TOP, ZERO, InternalFault, Xi, decode, encode

PRESENT = "present"
ABSENT = "absent"
BOTTOM = "bottom"
ERROR = "error"

_STATUS_OF = {ONE: PRESENT, ZERO: ABSENT, BOT: BOTTOM, TOP: ERROR}


def status_name(x: Xi) -> str:
    return _STATUS_OF[x]


@dataclass
class SimState:
    latch_values: dict[str, bool]
    instant: int = 0


@dataclass
class StepResult:
    outputs: dict[str, str]
    rtl: bool
    registers: dict[str, bool]
    error: str | None = None
    inputs: dict[str, str] = field(default_factory=dict)
    instant: int = 0

    def present_outputs(self) -> set[str]:
        return {s for s, st in self.outputs.items() if st == PRESENT}

    def trace_line(self) -> str:
        ins = ",".join(sorted(s for s, st in self.inputs.items() if st == PRESENT))
        outs = ",".join(sorted(self.present_outputs()))
        regs = ",".join(sorted(r for r, v in self.registers.items() if v))
        line = f"t={self.instant} in{{{ins}}} out{{{outs}}} regs{{{regs}}}"
        if self.error:
            line += f" error={self.error}"
        return line


class Simulator:
    def __init__(self, sys: BooleanSystem, sched: Schedule | None = None):
        if "_set" in sys.inputs:
            raise InternalFault("simulation needs a closed system; finalize or close it")
        self.sys = sys
        self.sched = sched or sort_system(sys)
        self.order = evaluation_order(self.sched)
        self.user_inputs = tuple(s for s in sys.inputs if not s.startswith("_"))
        self.user_outputs = tuple(s for s in sys.outputs if not s.startswith("_"))
        # a finalized system no longer reads any input's decided bit
        free = sys.free_wires()
        self.finalized = not any(f"{s}_def" in free for s in self.user_inputs)

    def initial_state(self) -> SimState:
        return SimState({l.name: l.init for l in self.sys.latches}, 0)

    def _input_bits(self, inputs: dict[str, Xi]) -> dict[str, bool]:
        bits: dict[str, bool] = {}
        for sig in self.sys.inputs:
            status = inputs.get(sig, ZERO if self.finalized else BOT)
            if status == BOT and self.finalized:
                raise ValueError(f"unknown status for input {sig!r} after finalization")
            d, v = encode(status)
            bits[f"{sig}_def"] = d
            bits[f"{sig}_val"] = v
        return bits

    def step(self, state: SimState, inputs: dict[str, Xi]) -> tuple[StepResult, SimState]:
        bits = self._input_bits(inputs)
        vals: dict[str, bool] = {}

        def look(atom) -> bool:
            assert isinstance(atom, BRef)
            w = atom.wire
            if w in vals:
                return vals[w]
            if w in bits:
                return bits[w]
            return state.latch_values[w]

        for wire in self.order:
            vals[wire] = eval_bool(self.sys.equations[wire], look)

        def signal_status(sig: str, wires: tuple[str, str]) -> Xi:
            d_w, v_w = wires
            if d_w in vals:
                return decode((vals[d_w], vals[v_w]))
            if d_w in bits:
                return decode((bits[d_w], bits[v_w]))
            return BOT

        outputs = {}
        error = None
        for sig in self.user_outputs:
            status = signal_status(sig, self.sys.signal_pair(sig))
            outputs[sig] = status_name(status)
            if status == TOP and error is None:
                error = f"signal {sig} has contradictory status"
        for sig in self.user_inputs:
            cur = self.sys.read_pair(sig)
            if cur[0] in vals and decode((vals[cur[0]], vals[cur[1]])) == TOP:
                error = error or f"signal {sig} has contradictory status"
        if "err$all_val" in vals and vals["err$all_val"]:
            error = error or "a conditional test observed a contradictory trigger"

        rtl = bool(vals.get("_rtl_val", False))
        next_latches = {l.name: vals[l.next_wire] for l in self.sys.latches}
        result = StepResult(
            outputs, rtl, dict(state.latch_values), error,
            {s: status_name(inputs.get(s, ZERO if self.finalized else BOT))
             for s in self.user_inputs},
            state.instant,
        )
        return result, SimState(next_latches, state.instant + 1)

    def step_present(self, state: SimState,
                     present: set[str]) -> tuple[StepResult, SimState]:
        """Step from a set of present inputs; every other input is absent."""
        inputs = {s: (ONE if s in present else ZERO) for s in self.user_inputs}
        return self.step(state, inputs)

    def run_trace(self, input_sequence: list[dict[str, Xi]]) -> list[StepResult]:
        state = self.initial_state()
        out = []
        for inputs in input_sequence:
            result, state = self.step(state, inputs)
            out.append(result)
            if result.error:
                break
        return out


def trace_text(results: list[StepResult]) -> str:
    return "\n".join(r.trace_line() for r in results) + ("\n" if results else "")

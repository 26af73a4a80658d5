"""Explicit-state safety checking of compiled observers.

Breadth-first search over latch valuations, branching on every input vector,
looking for a step that emits the alarm signal.  Breadth-first order makes
counterexamples shortest; vectors enumerate in lexicographic order over the
sorted input names so runs reproduce exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .lower import BooleanSystem
from .schedule import Schedule
from .simulate import SimState, Simulator
from .xi import ONE, ZERO


class StateBudgetExceeded(Exception):
    def __init__(self, budget: int):
        super().__init__(f"state budget of {budget} exceeded")
        self.budget = budget


@dataclass
class Safe:
    states_explored: int


@dataclass
class Counterexample:
    inputs: list[set[str]]  # per instant, the present input signals

    def depth(self) -> int:
        return len(self.inputs)


Verdict = Safe | Counterexample


def reach_check(sys: BooleanSystem, sched: Schedule | None, alarm: str,
                max_states: int = 10 ** 6) -> Verdict:
    sim = Simulator(sys, sched)
    if alarm not in sim.user_outputs:
        raise ValueError(f"alarm signal {alarm!r} is not an output")
    names = sorted(sim.user_inputs)
    vectors = [frozenset(itertools.compress(names, bits))
               for bits in itertools.product((False, True), repeat=len(names))]

    def key(state: SimState) -> tuple:
        return tuple(state.latch_values[l.name] for l in sim.sys.latches)

    initial = sim.initial_state()
    seen = {key(initial): (None, None, initial)}
    frontier = [key(initial)]
    explored = 1
    while frontier:
        next_frontier = []
        for state_key in frontier:
            state = seen[state_key][2]
            for vector in vectors:
                inputs = {s: (ONE if s in vector else ZERO) for s in names}
                result, nxt = sim.step(state, inputs)
                if result.outputs.get(alarm) == "present":
                    return Counterexample(_path(seen, state_key) + [set(vector)])
                nk = key(nxt)
                if nk not in seen:
                    if explored >= max_states:
                        raise StateBudgetExceeded(max_states)
                    seen[nk] = (state_key, set(vector), nxt)
                    explored += 1
                    next_frontier.append(nk)
        frontier = next_frontier
    return Safe(explored)


def _path(seen: dict, state_key: tuple) -> list[set[str]]:
    steps: list[set[str]] = []
    while True:
        parent, vector, _ = seen[state_key]
        if parent is None:
            break
        steps.append(vector)
        state_key = parent
    steps.reverse()
    return steps


def brute_force_check(sys: BooleanSystem, sched: Schedule | None, alarm: str,
                      depth: int) -> Verdict:
    """Oracle for reach_check: try every input sequence up to the given depth."""
    sim = Simulator(sys, sched)
    names = sorted(sim.user_inputs)
    vectors = [frozenset(itertools.compress(names, bits))
               for bits in itertools.product((False, True), repeat=len(names))]
    states_seen = set()

    def explore(state: SimState, prefix: list[set[str]]) -> Counterexample | None:
        states_seen.add(tuple(sorted(state.latch_values.items())))
        if len(prefix) == depth:
            return None
        for vector in vectors:
            inputs = {s: (ONE if s in vector else ZERO) for s in names}
            result, nxt = sim.step(state, inputs)
            if result.outputs.get(alarm) == "present":
                return Counterexample(prefix + [set(vector)])
            found = explore(nxt, prefix + [set(vector)])
            if found is not None:
                return found
        return None

    found = explore(sim.initial_state(), [])
    return found if found is not None else Safe(len(states_seen))

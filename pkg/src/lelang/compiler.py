"""Whole-module compilation pipeline.

One module compiles to an open unit: a sorted boolean system whose control
pair is still an input, so the unit can be instantiated by later compilations
without resorting its interior.  Callees found as compiled units splice in
with their recorded dates; only the new wires and the boundary get dates
computed.  Closing and finalizing happen per `finalize`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .behavioral import Interpreter
from .checks import Diagnostic, errors
from .circuit import Circuit, compile_module_circuit
from .lower import BooleanSystem, lower_module
from .parser import parse_program
from .resolve import ResolvedModule, resolve_program_module, resolve_runs
from .schedule import Schedule, extend_sort, sort_system


class StaticCheckFailure(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass
class CompiledModule:
    name: str
    system: BooleanSystem
    schedule: Schedule
    circuit: Circuit
    resolved: ResolvedModule
    date_work: int  # wires whose dates were computed rather than reused
    warnings: tuple[Diagnostic, ...] = ()


def compile_resolved(resolved: ResolvedModule, *, strict: bool = True) -> CompiledModule:
    diags = resolved.all_diagnostics()
    errs = errors(diags)
    if errs and strict:
        raise StaticCheckFailure(errs)
    circuit = compile_module_circuit(resolved)
    callee_systems = {s.callee.name: s.callee.document.system for s in circuit.sockets}
    sys = lower_module(circuit, callee_systems)
    if circuit.sockets:
        early: dict[str, int] = {}
        late: dict[str, int] = {}
        for socket in circuit.sockets:
            doc = socket.callee.document
            for wire, date in doc.schedule.early.items():
                early[f"{socket.prefix}.{wire}"] = date
            for wire, date in doc.schedule.late.items():
                late[f"{socket.prefix}.{wire}"] = date
        sched, touched = extend_sort(sys, early, late)
    else:
        sched = sort_system(sys)
        touched = len(sys.equations)
    warnings = tuple(d for d in diags if d.severity == "warning")
    return CompiledModule(resolved.module.name, sys, sched, circuit, resolved,
                          touched, warnings)


def compile_text(text: str, *, module: str | None = None,
                 search_paths: list[str] | None = None,
                 prefer_compiled: bool = True, source_file: str | None = None,
                 strict: bool = True) -> CompiledModule:
    program = parse_program(text, source_file)
    resolved = resolve_program_module(program, module, search_paths, prefer_compiled)
    return compile_resolved(resolved, strict=strict)


def compile_file(path: str, *, module: str | None = None,
                 search_paths: list[str] | None = None,
                 prefer_compiled: bool = True, strict: bool = True) -> CompiledModule:
    with open(path, encoding="utf-8") as handle:
        return compile_text(handle.read(), module=module, search_paths=search_paths,
                            prefer_compiled=prefer_compiled, source_file=path,
                            strict=strict)


def compile_all_modules(path: str, *, search_paths: list[str] | None = None,
                        prefer_compiled: bool = True,
                        strict: bool = True) -> list[CompiledModule]:
    """Compile every module of a source file, each as its own unit."""
    with open(path, encoding="utf-8") as handle:
        program = parse_program(handle.read(), source_file=path)
    units = []
    for m in program.modules:
        resolved = resolve_runs(m, search_paths, program, prefer_compiled)
        units.append(compile_resolved(resolved, strict=strict))
    return units


def oracle_for(path_or_text: str, *, module: str | None = None,
               search_paths: list[str] | None = None,
               is_path: bool = True) -> Interpreter:
    """Reference interpreter over the same sources, callees inlined."""
    text = open(path_or_text, encoding="utf-8").read() if is_path else path_or_text
    program = parse_program(text, source_file=path_or_text if is_path else None)
    resolved = resolve_program_module(program, module, search_paths,
                                      prefer_compiled=False)
    return Interpreter(resolved)

"""Binding of run statements to callee modules.

A run call binds, in order of preference, to a module of the same source file,
to a precompiled unit (<name>.lec), or to a source module (<name>.le) found on
the path given in the Run declaration or on the -I search paths.  Recursion is
rejected.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .ast import Automaton, Module, Program, Run, body_runs
from .checks import CalleeInterfaces, Diagnostic, check_static


class ResolveError(Exception):
    pass


@dataclass
class CompiledCallee:
    """A callee available only as a compiled unit."""
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    path: str  # file it was loaded from
    document: object  # lec.LecDocument


@dataclass
class ResolvedModule:
    module: Module
    # callee name -> ResolvedModule | CompiledCallee, covering the transitive closure
    callees: dict[str, "ResolvedModule | CompiledCallee"] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def interface_table(self) -> dict[str, tuple[tuple[str, ...], tuple[str, ...]]]:
        table = {}
        for name, callee in self.callees.items():
            if isinstance(callee, CompiledCallee):
                table[name] = (callee.inputs, callee.outputs)
            else:
                table[name] = (callee.module.inputs, callee.module.outputs)
        return table

    def all_diagnostics(self) -> list[Diagnostic]:
        seen: list[Diagnostic] = list(self.diagnostics)
        for callee in self.callees.values():
            if isinstance(callee, ResolvedModule):
                seen.extend(d for d in callee.all_diagnostics() if d not in seen)
        return seen


def _find_callee_file(name: str, declared_dirs: list[str], search_paths: list[str],
                      prefer_compiled: bool) -> tuple[str, str] | None:
    """Locate <name>.lec or <name>.le; returns (kind, path).

    The preferred form wins across every directory before the other form is
    considered, so an already compiled unit anywhere beats recompiling from
    source on the declared path.
    """
    exts = (".lec", ".le") if prefer_compiled else (".le", ".lec")
    for ext in exts:
        for directory in declared_dirs + list(search_paths):
            candidate = os.path.join(directory, name + ext)
            if os.path.isfile(candidate):
                return ("compiled" if ext == ".lec" else "source", candidate)
    return None


def resolve_runs(module: Module, search_paths: list[str] | None = None,
                 program: Program | None = None,
                 prefer_compiled: bool = True,
                 _stack: tuple[str, ...] = ()) -> ResolvedModule:
    """Bind every run of `module` (transitively) and run the static checks."""
    from .lec import read_lec_file  # local import: lec depends on nothing above

    search_paths = search_paths or []
    if module.name in _stack:
        cycle = " -> ".join(_stack + (module.name,))
        raise ResolveError(f"recursive run cycle: {cycle}")

    resolved = ResolvedModule(module)
    decl_dirs = {d.module: d.path for d in module.run_decls}
    base_dir = os.path.dirname(module.source_file) if module.source_file else "."

    for run in body_runs(module.body):
        if run.module in resolved.callees:
            continue
        if run.module == module.name:
            raise ResolveError(f"recursive run cycle: {module.name} -> {module.name}")
        # 1. same-file module
        sibling = program.get(run.module) if program is not None else None
        if sibling is not None:
            sub = resolve_runs(sibling, search_paths, program, prefer_compiled,
                               _stack + (module.name,))
            resolved.callees[run.module] = sub
            continue
        # 2. declared path, then search paths
        declared = []
        if run.module in decl_dirs:
            d = decl_dirs[run.module]
            declared.append(d if os.path.isabs(d) else os.path.normpath(os.path.join(base_dir, d)))
        found = _find_callee_file(run.module, declared, search_paths, prefer_compiled)
        if found is None:
            raise ResolveError(f"module {run.module!r} not found "
                               f"(searched {declared + list(search_paths)})")
        kind, path = found
        if kind == "compiled":
            doc = read_lec_file(path)
            if doc.name != run.module:
                raise ResolveError(f"{path} holds module {doc.name!r}, expected {run.module!r}")
            resolved.callees[run.module] = CompiledCallee(
                doc.name, doc.user_inputs, doc.user_outputs, path, doc)
        else:
            from .parser import parse_program
            with open(path, encoding="utf-8") as handle:
                sub_program = parse_program(handle.read(), source_file=path)
            sub = sub_program.get(run.module)
            if sub is None:
                raise ResolveError(f"{path} does not define module {run.module!r}")
            resolved.callees[run.module] = resolve_runs(
                sub, search_paths, sub_program, prefer_compiled, _stack + (module.name,))

    # renaming arity/name validation happens inside check_static
    callee_ifaces = CalleeInterfaces(resolved.interface_table())
    resolved.diagnostics = check_static(module, callee_ifaces)
    _validate_renamings(module, resolved)
    return resolved


def _validate_renamings(module: Module, resolved: ResolvedModule) -> None:
    table = resolved.interface_table()
    for run in body_runs(module.body):
        inputs, outputs = table[run.module]
        formals = set(inputs) | set(outputs)
        for _new, formal in run.renamings:
            if formal not in formals:
                raise ResolveError(
                    f"run {run.module}: renaming references unknown formal {formal!r}")
        named = [f for _, f in run.renamings]
        if len(set(named)) != len(named):
            raise ResolveError(f"run {run.module}: a formal signal is renamed twice")


def resolve_program_module(program: Program, name: str | None = None,
                           search_paths: list[str] | None = None,
                           prefer_compiled: bool = True) -> ResolvedModule:
    """Resolve the named module (default: last module) of a parsed program."""
    module = program.modules[-1] if name is None else program.get(name)
    if module is None:
        raise ResolveError(f"module {name!r} not present in source")
    return resolve_runs(module, search_paths, program, prefer_compiled)

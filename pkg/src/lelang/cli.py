"""Command line front end.

    lelang compile FILE.le [-I DIR]... [-o DIR] [--inline]
    lelang link A.lec B.lec [...] -o OUT.lec [--verbose]
    lelang finalize IN.lec [-o OUT.lec] [--blif OUT.blif]
    lelang simulate IN.lec (--inputs FILE | --interactive) [--instants N]
    lelang check IN.lec --alarm SIG [--max-states N]
    lelang serve [--host H] [--port P] [--assets DIR]

Exit codes: 0 success, 1 syntax error, 2 static check failure,
3 causality cycle, 4 input/output failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .checks import errors as diag_errors
from .compiler import StaticCheckFailure, compile_all_modules
from .errors import CausalityCycle, LecError
from .finalize import export_blif, finalize
from .lec import read_lec_file, write_lec, write_lec_file
from .parser import ParseError
from .reach import Counterexample, Safe, StateBudgetExceeded, reach_check
from .resolve import ResolveError
from .schedule import link
from .simulate import Simulator, trace_text
from .xi import ONE, ZERO, Xi

EXIT_SYNTAX = 1
EXIT_STATIC = 2
EXIT_CAUSALITY = 3
EXIT_IO = 4


class CliFailure(Exception):
    def __init__(self, code: int, message: str, **payload):
        super().__init__(message)
        self.code = code
        self.payload = {"error": message, **payload}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.handler(args)
    except CliFailure as exc:
        emit(args, exc.payload, file=sys.stderr)
        return exc.code
    except ParseError as exc:
        emit(args, {"error": str(exc), "line": exc.line, "column": exc.column},
             file=sys.stderr)
        return EXIT_SYNTAX
    except StaticCheckFailure as exc:
        emit(args, {"error": "static checks failed",
                    "diagnostics": [str(d) for d in exc.diagnostics]},
             file=sys.stderr)
        return EXIT_STATIC
    except CausalityCycle as exc:
        emit(args, {"error": "causality cycle", "cycle": exc.variables},
             file=sys.stderr)
        return EXIT_CAUSALITY
    except (ResolveError, LecError, OSError) as exc:
        emit(args, {"error": str(exc)}, file=sys.stderr)
        return EXIT_IO
    if result:
        emit(args, result)
    return 0


def emit(args, payload: dict, file=sys.stdout) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload), file=file)
        return
    if "error" in payload:
        print("error: " + str(payload["error"]), file=file)
        for d in payload.get("diagnostics", ()):
            print("  " + d, file=file)
        if "cycle" in payload:
            print("  cycle: " + " -> ".join(payload["cycle"]), file=file)
    else:
        for key, value in payload.items():
            if key == "trace":
                print(value, end="")
            else:
                print(f"{key}: {value}", file=file)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lelang", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(required=True)

    c = sub.add_parser("compile", help="compile .le modules to .lec units")
    c.add_argument("source")
    c.add_argument("-I", "--include", action="append", default=[],
                   help="directory searched for callee sources or units")
    c.add_argument("-o", "--output-dir")
    c.add_argument("--inline", action="store_true",
                   help="prefer callee sources over compiled units")
    c.add_argument("--json", action="store_true")
    c.set_defaults(handler=cmd_compile)

    l = sub.add_parser("link", help="merge sorted units without resorting")
    l.add_argument("units", nargs="+")
    l.add_argument("-o", "--output", required=True)
    l.add_argument("--verbose", action="store_true")
    l.add_argument("--json", action="store_true")
    l.set_defaults(handler=cmd_link)

    f = sub.add_parser("finalize", help="close, decide inputs, simplify, export")
    f.add_argument("unit")
    f.add_argument("-o", "--output")
    f.add_argument("--blif")
    f.add_argument("--json", action="store_true")
    f.set_defaults(handler=cmd_finalize)

    s = sub.add_parser("simulate", help="run a finalized unit tick by tick")
    s.add_argument("unit")
    s.add_argument("--inputs", help="trace file: one `sig=0/1` list per line")
    s.add_argument("--interactive", action="store_true")
    s.add_argument("--instants", type=int, default=None)
    s.add_argument("--json", action="store_true")
    s.set_defaults(handler=cmd_simulate)

    k = sub.add_parser("check", help="explicit-state safety check of an alarm signal")
    k.add_argument("unit")
    k.add_argument("--alarm", required=True)
    k.add_argument("--max-states", type=int, default=10 ** 6)
    k.add_argument("--json", action="store_true")
    k.set_defaults(handler=cmd_check)

    v = sub.add_parser("serve", help="run the interactive session service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8859)
    v.add_argument("--assets", help="directory of UI files to serve")
    v.add_argument("-I", "--include", action="append", default=[])
    v.add_argument("--json", action="store_true")
    v.set_defaults(handler=cmd_serve)
    return p


def cmd_compile(args) -> dict:
    units = compile_all_modules(args.source, search_paths=args.include,
                                prefer_compiled=not args.inline)
    out_dir = args.output_dir or os.path.dirname(os.path.abspath(args.source))
    written = []
    warnings = []
    for unit in units:
        path = os.path.join(out_dir, unit.name + ".lec")
        write_lec_file(path, unit.system, unit.schedule)
        written.append(path)
        warnings.extend(str(w) for w in unit.warnings)
    payload = {"units": written}
    if warnings:
        payload["warnings"] = warnings
    return payload


def cmd_link(args) -> dict:
    docs = [read_lec_file(path) for path in args.units]
    if len(docs) < 2:
        raise CliFailure(EXIT_IO, "link needs at least two units")
    acc = (docs[0].system, docs[0].schedule)
    touched = 0
    for doc in docs[1:]:
        result = link(acc, (doc.system, doc.schedule))
        acc = (result.system, result.schedule)
        touched += result.touched
    write_lec_file(args.output, acc[0], acc[1])
    payload = {"output": args.output}
    if args.verbose:
        payload["date_work"] = touched
        payload["total_wires"] = len(acc[0].equations)
    return payload


def cmd_finalize(args) -> dict:
    doc = read_lec_file(args.unit)
    fin = finalize(doc.system, doc.schedule)
    out = args.output or os.path.splitext(args.unit)[0] + ".final.lec"
    write_lec_file(out, fin.system, fin.schedule)
    payload = {"output": out}
    if args.blif:
        with open(args.blif, "w", encoding="utf-8") as handle:
            handle.write(export_blif(fin))
        payload["blif"] = args.blif
    return payload


def _parse_trace_line(line: str, lineno: int, known: tuple[str, ...]) -> dict[str, Xi]:
    inputs: dict[str, Xi] = {}
    body = line.split("#", 1)[0].strip()
    if not body:
        return inputs
    for item in body.split():
        if "=" not in item:
            raise CliFailure(EXIT_IO, f"trace line {lineno}: expected sig=0/1, got {item!r}")
        sig, _, value = item.partition("=")
        if sig not in known:
            raise CliFailure(EXIT_IO, f"trace line {lineno}: unknown input {sig!r}")
        if value not in ("0", "1"):
            raise CliFailure(EXIT_IO, f"trace line {lineno}: bad value {value!r}")
        inputs[sig] = ONE if value == "1" else ZERO
    return inputs


def _finalized_simulator(path: str) -> Simulator:
    doc = read_lec_file(path)
    if doc.is_open:
        fin = finalize(doc.system, doc.schedule)
        return Simulator(fin.system, fin.schedule)
    return Simulator(doc.system, doc.schedule)


def cmd_simulate(args) -> dict:
    sim = _finalized_simulator(args.unit)
    if args.interactive:
        source = sys.stdin
    elif args.inputs:
        source = open(args.inputs, encoding="utf-8")
    else:
        raise CliFailure(EXIT_IO, "simulate needs --inputs FILE or --interactive")
    results = []
    state = sim.initial_state()
    with source:
        for lineno, line in enumerate(source, start=1):
            inputs = _parse_trace_line(line, lineno, sim.user_inputs)
            result, state = sim.step(state, inputs)
            if args.interactive:
                print(result.trace_line(), flush=True)
            results.append(result)
            if result.error:
                break
            if args.instants is not None and len(results) >= args.instants:
                break
    if args.json:
        return {"steps": [
            {"instant": r.instant, "outputs": r.outputs, "rtl": r.rtl,
             "registers": r.registers, "error": r.error} for r in results]}
    return {} if args.interactive else {"trace": trace_text(results)}


def cmd_check(args) -> dict:
    sim_doc = read_lec_file(args.unit)
    system, sched = sim_doc.system, sim_doc.schedule
    if sim_doc.is_open:
        fin = finalize(system, sched)
        system, sched = fin.system, fin.schedule
    try:
        verdict = reach_check(system, sched, args.alarm, args.max_states)
    except StateBudgetExceeded as exc:
        raise CliFailure(EXIT_IO, str(exc))
    if isinstance(verdict, Safe):
        return {"verdict": "safe", "states_explored": verdict.states_explored}
    assert isinstance(verdict, Counterexample)
    return {"verdict": "counterexample",
            "inputs": [sorted(step) for step in verdict.inputs]}


def cmd_serve(args) -> dict:
    import uvicorn

    from .service import Config, build_app

    config = Config(search_paths=tuple(args.include), assets_dir=args.assets)
    app = build_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return {}


if __name__ == "__main__":
    sys.exit(main())

"""Toolchain for the LE synchronous reactive language.

Modules:
  xi          four-valued signal status algebra and environments
  ast         surface syntax tree
  parser      lexer and parser for .le sources
  checks      static diagnostics (loops, locals, automata)
  resolve     binding of run declarations to modules
  behavioral  term-rewriting reference interpreter
  circuit     translation of statements to status-valued circuits
  lower       boolean pair lowering of circuits
  schedule    dependency forest, early/late dates, incremental link
  lec         compiled-unit text format
  bdd         canonical boolean functions
  finalize    input closure, simplification, BLIF export
  simulate    levelized tick simulation
  reach       explicit-state safety checking
  compiler    whole-module pipeline
  cli         command line entry points
  service     local session service for interactive simulation
"""

__version__ = "0.1.0"

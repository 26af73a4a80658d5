"""Shared toolchain error types."""

from __future__ import annotations


class CausalityCycle(Exception):
    """An instantaneous dependency cycle between equations."""

    def __init__(self, variables: list[str]):
        self.variables = variables
        super().__init__("causality cycle through: " + " -> ".join(variables))


class LecError(Exception):
    """Malformed compiled-unit text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)

"""Solver-specific command line and option adapters."""

from __future__ import annotations

import shutil
from abc import ABC, abstractmethod
from pathlib import Path
from typing import TYPE_CHECKING, ClassVar

if TYPE_CHECKING:
    from ..config import SolverConfig


class SolverRuntimeAdapter(ABC):
    """Base adapter for an SMT-LIB2 executable driven over stdin/stdout."""

    kind: ClassVar[str]
    display_name: ClassVar[str]
    default_command: ClassVar[str]

    def __init__(self, config: "SolverConfig") -> None:
        self.config = config
        self.executable = config.path or self.default_command
        self.timeout_ms = int(config.timeout_s * 1000)

    def build_command(self) -> list[str]:
        return [self.executable, *self.interactive_cli_args(), *self.config.args]

    @abstractmethod
    def interactive_cli_args(self) -> list[str]:
        """Flags that put the solver into incremental stdin mode."""
        ...

    @abstractmethod
    def seed_options(self) -> list[str]:
        ...

    def timeout_options(self) -> list[str]:
        return [f"(set-option :timeout {self.timeout_ms})"]

    def preamble(self) -> list[str]:
        return [
            "(set-option :print-success false)",
            "(set-option :produce-models true)",
            "(set-option :produce-unsat-cores true)",
            *self.seed_options(),
            *self.timeout_options(),
            f"(set-logic {self.config.logic})",
        ]

    def available(self) -> bool:
        if Path(self.executable).is_file():
            return True
        return shutil.which(self.executable) is not None


class Z3RuntimeAdapter(SolverRuntimeAdapter):
    kind = "z3"
    display_name = "Z3"
    default_command = "z3"

    def interactive_cli_args(self) -> list[str]:
        return ["-in", "-smt2"]

    def seed_options(self) -> list[str]:
        seed = self.config.seed
        return [f"(set-option :random-seed {seed})", f"(set-option :smt.random_seed {seed})"]


class Cvc5RuntimeAdapter(SolverRuntimeAdapter):
    kind = "cvc5"
    display_name = "cvc5"
    default_command = "cvc5"

    def interactive_cli_args(self) -> list[str]:
        return ["--lang=smt2", "--incremental"]

    def seed_options(self) -> list[str]:
        return [f"(set-option :seed {self.config.seed})"]

    def timeout_options(self) -> list[str]:
        return [f"(set-option :tlimit-per {self.timeout_ms})"]


RUNTIMES: dict[str, type[SolverRuntimeAdapter]] = {
    Z3RuntimeAdapter.kind: Z3RuntimeAdapter,
    Cvc5RuntimeAdapter.kind: Cvc5RuntimeAdapter,
}


def runtime_for(config: "SolverConfig") -> SolverRuntimeAdapter:
    """Adapter chosen from the executable name; anything unrecognised is driven like z3."""

    name = Path(config.path or "z3").name.lower()
    for kind, adapter in RUNTIMES.items():
        if name.startswith(kind):
            return adapter(config)
    return Z3RuntimeAdapter(config)


__all__ = ["Cvc5RuntimeAdapter", "RUNTIMES", "SolverRuntimeAdapter", "Z3RuntimeAdapter", "runtime_for"]

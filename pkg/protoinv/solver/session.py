"""Solver sessions: one incremental conversation over a finite instance."""

from __future__ import annotations

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Optional, Sequence

from ..errors import SolverError, SolverProtocolError, SolverTimeoutError
from ..grounding.ground import Node
from .runtime import SolverRuntimeAdapter, Z3RuntimeAdapter, runtime_for
from .smtlib import SExpr, SmtRenderer, error_message, parse_responses, quote, truncate
from .transport import EmbeddedTransport, ProcessTransport, SolverTransport, Transcript
from .worker import SessionStats

if TYPE_CHECKING:
    from ..config import SolverConfig
    from ..grounding.instance import FiniteInstance

logger = logging.getLogger(__name__)


class Status(str, Enum):
    SAT = "sat"
    UNSAT = "unsat"


@dataclass(frozen=True)
class CheckResult:
    status: Status
    core: tuple[str, ...] = ()

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    @property
    def unsat(self) -> bool:
        return self.status is Status.UNSAT


class SolverSession(ABC):
    """Assertions, activation handles and assumption checks over one instance.

    Definition biconditionals for both frames are asserted when the session
    opens. Handles are plain boolean names usable as assumptions; handles
    created inside a `push` scope are forgotten on the matching `pop`.
    """

    def __init__(self, instance: "FiniteInstance", *, label: str = "session") -> None:
        self.instance = instance
        self.label = label
        self.stats = SessionStats()
        self.depth = 0
        self._handles: dict[str, str] = {}
        self._literals: dict[int, str] = {}
        self._scoped: list[list[tuple[str, object]]] = []
        self._counter = 0
        self.closed = False

    def __enter__(self) -> "SolverSession":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def _fresh(self, prefix: str) -> str:
        self._counter += 1
        return f"{prefix}.{self._counter}"

    def _remember(self, table: str, key: object) -> None:
        if self._scoped:
            self._scoped[-1].append((table, key))

    # Backend hooks

    @abstractmethod
    def _declare_bool(self, name: str) -> None:
        ...

    @abstractmethod
    def _assert(self, node: Node, guard: Optional[str]) -> None:
        ...

    @abstractmethod
    def _define(self, name: str, node: Node) -> None:
        """Constrain boolean `name` to be equivalent to `node`."""

    @abstractmethod
    def _check(self, assumptions: Sequence[str], want_core: bool) -> CheckResult:
        ...

    @abstractmethod
    def _values(self, keys: Sequence[str]) -> dict[str, bool | int]:
        ...

    @abstractmethod
    def _push(self) -> None:
        ...

    @abstractmethod
    def _pop(self) -> None:
        ...

    @abstractmethod
    def _close(self) -> None:
        ...

    # Public surface

    def activation(self, name: str) -> str:
        """A named boolean handle, declared on first use."""

        known = self._handles.get(name)
        if known is None:
            self._declare_bool(name)
            self._handles[name] = name
            self._remember("handle", name)
            known = name
        return known

    def literal(self, node: Node) -> str:
        """A handle equivalent to `node`, cached per node."""

        known = self._literals.get(node.uid)
        if known is None:
            known = self._fresh("lit")
            self._declare_bool(known)
            self._define(known, node)
            self._literals[node.uid] = known
            self._remember("literal", node.uid)
        return known

    def add(self, node: Node, *, guard: Optional[str] = None) -> None:
        """Assert `node`, or `guard => node` when a guard handle is given."""

        self._assert(node, guard)

    def retire(self, guard: str) -> None:
        """Permanently disable everything asserted under `guard`."""

        self._assert(self.instance.builder.false, guard)

    def check(self, assumptions: Sequence[str] = (), *, kind: str = "check", want_core: bool = False) -> CheckResult:
        started = time.monotonic()
        result = self._check(list(assumptions), want_core)
        self.stats.record(kind, result.status.value, time.monotonic() - started)
        return result

    def values(self, keys: Sequence[str]) -> dict[str, bool | int]:
        return self._values(list(keys))

    def state_values(self, *, next_state: bool = False) -> dict[str, bool | int]:
        """Model values of every state atom (of the primed copy when `next_state`)."""

        keys = [info.key + ("'" if next_state else "") for info in self.instance.state_atoms]
        found = self._values(keys)
        return {info.key: found[key] for info, key in zip(self.instance.state_atoms, keys)}

    def push(self) -> None:
        self._push()
        self.depth += 1
        self._scoped.append([])

    def pop(self) -> None:
        if self.depth == 0:
            raise SolverError("pop without matching push")
        self._pop()
        self.depth -= 1
        for table, key in self._scoped.pop():
            if table == "handle":
                self._handles.pop(str(key), None)
            else:
                self._literals.pop(int(key), None)  # type: ignore[arg-type]

    def close(self) -> None:
        if self.closed:
            return
        self.closed = True
        self._close()
        logger.debug("closed solver session %s: %s", self.label, self.stats.as_dict())


class SmtSession(SolverSession):
    """SMT-LIB2 conversation; declarations and assertions are batched until the next check."""

    def __init__(
        self,
        instance: "FiniteInstance",
        transport: SolverTransport,
        runtime: SolverRuntimeAdapter,
        *,
        transcript: Optional[Transcript] = None,
        label: str = "session",
    ) -> None:
        super().__init__(instance, label=label)
        self.transport = transport
        self.runtime = runtime
        self.transcript = transcript or Transcript()
        self.renderer = SmtRenderer(instance)
        self._pending: list[str] = [
            *runtime.preamble(),
            *self.renderer.declarations(),
        ]
        for node in (instance.definitions_current, instance.definitions_next):
            self._assert(node, None)

    def _expr(self, node: Node) -> str:
        return self.renderer.expression(node, self._pending)

    def _send(self, commands: list[str]) -> list[SExpr]:
        batch = self._pending + commands
        self._pending = []
        text = "\n".join(batch)
        self.transcript.sent(text)
        reply = self.transport.exchange(batch)
        self.transcript.received(reply)
        items = parse_responses(reply)
        for item in items:
            message = error_message(item)
            if message is not None:
                logger.warning("solver error in %s: %s", self.label, truncate(message))
                raise SolverProtocolError(f"solver rejected input: {message}")
        return items

    def _declare_bool(self, name: str) -> None:
        self._pending.append(f"(declare-const {quote(name)} Bool)")

    def _assert(self, node: Node, guard: Optional[str]) -> None:
        expr = self._expr(node)
        if guard is None:
            self._pending.append(f"(assert {expr})")
        else:
            self._pending.append(f"(assert (=> {quote(guard)} {expr}))")

    def _define(self, name: str, node: Node) -> None:
        self._pending.append(f"(assert (= {quote(name)} {self._expr(node)}))")

    def _check(self, assumptions: Sequence[str], want_core: bool) -> CheckResult:
        if assumptions:
            command = f"(check-sat-assuming ({' '.join(quote(name) for name in assumptions)}))"
        else:
            command = "(check-sat)"
        items = self._send([command])
        if len(items) != 1 or not isinstance(items[0], str):
            raise SolverProtocolError(f"unexpected check-sat reply: {items!r}")
        answer = items[0]
        if answer == "sat":
            return CheckResult(Status.SAT)
        if answer == "unsat":
            core: tuple[str, ...] = ()
            if want_core:
                reply = self._send(["(get-unsat-core)"])
                if len(reply) != 1 or not isinstance(reply[0], list):
                    raise SolverProtocolError(f"unexpected unsat core reply: {reply!r}")
                core = tuple(str(name) for name in reply[0])
            return CheckResult(Status.UNSAT, core)
        if answer == "unknown":
            raise SolverTimeoutError(f"solver returned unknown in {self.label} (timeout {self.runtime.config.timeout_s}s)")
        raise SolverProtocolError(f"unexpected check-sat answer {answer!r}")

    def _values(self, keys: Sequence[str]) -> dict[str, bool | int]:
        if not keys:
            return {}
        reply = self._send([f"(get-value ({' '.join(quote(key) for key in keys)}))"])
        if len(reply) != 1 or not isinstance(reply[0], list):
            raise SolverProtocolError(f"unexpected get-value reply: {reply!r}")
        found: dict[str, bool | int] = {}
        for entry in reply[0]:
            if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], str):
                raise SolverProtocolError(f"malformed get-value entry: {entry!r}")
            found[entry[0]] = self.renderer.decode(entry[0], entry[1])
        missing = [key for key in keys if key not in found]
        if missing:
            raise SolverProtocolError(f"get-value omitted {missing[0]}")
        return found

    def _push(self) -> None:
        self._pending.append("(push 1)")
        self.renderer.push()

    def _pop(self) -> None:
        self._pending.append("(pop 1)")
        self.renderer.pop()

    def _close(self) -> None:
        try:
            self.transport.close()
        finally:
            self.transcript.close()

    @property
    def transcript_digest(self) -> str:
        return self.transcript.digest


def open_session(instance: "FiniteInstance", config: "SolverConfig", *, label: str = "session") -> SolverSession:
    """A session on the configured transport.

    `auto` uses the external executable when a path is configured and the
    embedded z3 library otherwise.
    """

    transport_kind = config.transport
    if transport_kind == "auto":
        transport_kind = "process" if config.path else "embedded"
    transcript_dir = Path(config.transcript_dir) if config.transcript_dir else None
    transcript = Transcript.in_directory(transcript_dir, f"{label}-{instance.label}")
    if transport_kind == "dimacs":
        from .dimacs import DimacsSession

        return DimacsSession(instance, config, transcript=transcript, label=label)
    if transport_kind == "embedded":
        runtime: SolverRuntimeAdapter = Z3RuntimeAdapter(config)
        transport: SolverTransport = EmbeddedTransport()
    else:
        runtime = runtime_for(config)
        transport = ProcessTransport(runtime)
    logger.debug("opening %s session %s on %s", transport.name, label, instance.label)
    return SmtSession(instance, transport, runtime, transcript=transcript, label=label)


__all__ = ["CheckResult", "SmtSession", "SolverSession", "Status", "open_session"]

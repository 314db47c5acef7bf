"""Pure-SAT fallback: Tseitin clauses in DIMACS for an external SAT binary."""

from __future__ import annotations

import logging
import subprocess
import tempfile
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Optional, Sequence

from ..errors import SolverProtocolError, SolverTimeoutError, SolverTransportError
from ..grounding.ground import Node, Op, unprimed
from .session import CheckResult, SolverSession, Status
from .smtlib import truncate
from .transport import Transcript

if TYPE_CHECKING:
    from ..config import SolverConfig
    from ..grounding.instance import FiniteInstance

logger = logging.getLogger(__name__)

Runner = Callable[[list[str], float], "subprocess.CompletedProcess[str]"]


def _run(command: list[str], timeout: float) -> "subprocess.CompletedProcess[str]":
    return subprocess.run(command, capture_output=True, text=True, timeout=timeout, check=False)


class CnfEncoder:
    """Tseitin encoding of ground nodes; enumerated atoms use binary codes."""

    def __init__(self, instance: "FiniteInstance") -> None:
        self.instance = instance
        self.count = 1
        self.clauses: list[tuple[int, ...]] = []
        self.true = 1
        self.clauses.append((1,))
        self._bits: dict[str, tuple[int, ...]] = {}
        self._cache: dict[int, int] = {}

    def fresh(self) -> int:
        self.count += 1
        return self.count

    def bits(self, key: str) -> tuple[int, ...]:
        """Variables of an atom, least significant bit first; codes past the domain are excluded."""

        known = self._bits.get(key)
        if known is not None:
            return known
        size = self.instance.domain_size(key)
        info = self.instance.atom(unprimed(key))
        width = 1 if info.sort is None else max(1, (size - 1).bit_length())
        variables = tuple(self.fresh() for _ in range(width))
        if info.sort is not None:
            for code in range(size, 1 << width):
                self.clauses.append(tuple(-v if code >> i & 1 else v for i, v in enumerate(variables)))
        self._bits[key] = variables
        return variables

    def _code(self, key: str, value: int) -> list[int]:
        return [v if value >> i & 1 else -v for i, v in enumerate(self.bits(key))]

    def _and(self, parts: list[int]) -> int:
        out = self.fresh()
        for part in parts:
            self.clauses.append((-out, part))
        self.clauses.append((out, *(-part for part in parts)))
        return out

    def _or(self, parts: list[int]) -> int:
        out = self.fresh()
        for part in parts:
            self.clauses.append((out, -part))
        self.clauses.append((-out, *parts))
        return out

    def _iff(self, left: int, right: int) -> int:
        out = self.fresh()
        self.clauses.extend([(-out, -left, right), (-out, left, -right), (out, left, right), (out, -left, -right)])
        return out

    def encode(self, node: Node) -> int:
        """A literal equivalent to `node`."""

        known = self._cache.get(node.uid)
        if known is not None:
            return known
        stack: list[tuple[Node, bool]] = [(node, False)]
        while stack:
            item, ready = stack.pop()
            if item.uid in self._cache:
                continue
            if not ready:
                stack.append((item, True))
                stack.extend((child, False) for child in item.children if child.uid not in self._cache)
                continue
            kids = [self._cache[child.uid] for child in item.children]
            op = item.op
            if op is Op.CONST:
                lit = self.true if item.value else -self.true
            elif op is Op.ATOM:
                lit = self.bits(item.key or "")[0]
            elif op is Op.EQ:
                lit = self._and(self._code(item.key or "", int(item.value or 0)))
            elif op is Op.EQV:
                left, right = self.bits(item.key or ""), self.bits(item.other or "")
                lit = self._and([self._iff(a, b) for a, b in zip(left, right)])
            elif op is Op.NOT:
                lit = -kids[0]
            elif op is Op.AND:
                lit = self._and(kids)
            elif op is Op.OR:
                lit = self._or(kids)
            elif op is Op.IFF:
                lit = self._iff(kids[0], kids[1])
            else:
                lit = kids[0]
            self._cache[item.uid] = lit
        return self._cache[node.uid]

    def decode(self, key: str, model: set[int]) -> bool | int:
        variables = self.bits(key)
        info = self.instance.atom(unprimed(key))
        if info.sort is None:
            return variables[0] in model
        return sum(1 << i for i, v in enumerate(variables) if v in model)


def render_dimacs(count: int, clauses: Sequence[tuple[int, ...]]) -> str:
    lines = [f"p cnf {count} {len(clauses)}"]
    lines.extend(" ".join(str(lit) for lit in clause) + " 0" for clause in clauses)
    return "\n".join(lines) + "\n"


def parse_sat_output(text: str) -> Optional[set[int]]:
    """Model literals for a satisfiable answer, None for unsatisfiable."""

    status: Optional[str] = None
    model: set[int] = set()
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v "):
            model.update(int(item) for item in line[2:].split() if item != "0")
    if status == "SATISFIABLE":
        return model
    if status == "UNSATISFIABLE":
        return None
    if status == "UNKNOWN":
        raise SolverTimeoutError("SAT solver answered UNKNOWN")
    raise SolverProtocolError(f"SAT solver printed no status line: {truncate(text)}")


class DimacsSession(SolverSession):
    """Non-incremental session; each check writes the whole clause database.

    Assumptions become unit clauses, so the reported core is all of them.
    """

    def __init__(
        self,
        instance: "FiniteInstance",
        config: "SolverConfig",
        *,
        transcript: Optional[Transcript] = None,
        label: str = "session",
        runner: Runner = _run,
    ) -> None:
        super().__init__(instance, label=label)
        if not config.sat_path:
            raise SolverTransportError("solver.sat_path is required for the dimacs transport", code="solver_unavailable")
        self.config = config
        self.encoder = CnfEncoder(instance)
        self.transcript = transcript or Transcript()
        self._runner = runner
        self._names: dict[str, int] = {}
        self._asserted: list[tuple[int, ...]] = []
        self._marks: list[int] = []
        self._model: Optional[set[int]] = None
        for node in (instance.definitions_current, instance.definitions_next):
            self._assert(node, None)

    def _declare_bool(self, name: str) -> None:
        self._names[name] = self.encoder.fresh()

    def _assert(self, node: Node, guard: Optional[str]) -> None:
        lit = self.encoder.encode(node)
        if guard is None:
            self._asserted.append((lit,))
        else:
            self._asserted.append((-self._names[guard], lit))

    def _define(self, name: str, node: Node) -> None:
        lit = self.encoder.encode(node)
        handle = self._names[name]
        self.encoder.clauses.extend([(-handle, lit), (handle, -lit)])

    def _check(self, assumptions: Sequence[str], want_core: bool) -> CheckResult:
        units = [(self._names[name],) for name in assumptions]
        text = render_dimacs(self.encoder.count, [*self.encoder.clauses, *self._asserted, *units])
        self.transcript.sent(text)
        with tempfile.TemporaryDirectory(prefix="protoinv-") as folder:
            path = Path(folder) / "query.cnf"
            path.write_text(text, encoding="utf-8")
            command = [self.config.sat_path or "", *self.config.args, str(path)]
            try:
                completed = self._runner(command, self.config.timeout_s)
            except subprocess.TimeoutExpired as error:
                raise SolverTimeoutError(f"SAT solver exceeded {self.config.timeout_s}s") from error
            except OSError as error:
                raise SolverTransportError(f"cannot run {command[0]}: {error}", code="solver_unavailable") from error
        self.transcript.received(completed.stdout)
        model = parse_sat_output(completed.stdout)
        if model is None:
            self._model = None
            return CheckResult(Status.UNSAT, tuple(assumptions) if want_core else ())
        self._model = model
        return CheckResult(Status.SAT)

    def _values(self, keys: Sequence[str]) -> dict[str, bool | int]:
        if self._model is None:
            raise SolverProtocolError("no model available")
        return {key: self.encoder.decode(key, self._model) for key in keys}

    def _push(self) -> None:
        self._marks.append(len(self._asserted))

    def _pop(self) -> None:
        del self._asserted[self._marks.pop():]

    def _close(self) -> None:
        self.transcript.close()


__all__ = ["CnfEncoder", "DimacsSession", "parse_sat_output", "render_dimacs"]

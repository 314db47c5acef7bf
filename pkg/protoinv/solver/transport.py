"""Wire transports for SMT-LIB2 conversations and their transcripts."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import queue
import subprocess
import threading
import time
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Callable, ClassVar, Optional
from uuid import uuid4

import z3

from ..errors import SolverProtocolError, SolverTimeoutError, SolverTransportError
from .runtime import SolverRuntimeAdapter
from .smtlib import truncate
from .worker import SolverWorkerState

logger = logging.getLogger(__name__)

_MARKER = "protoinv-ready"
_STDERR_TAIL = 1_000


def _write_record(log: Any, record: dict[str, Any]) -> None:
    log.write(json.dumps(record, ensure_ascii=False) + "\n")
    log.flush()


class Transcript:
    """JSONL log of one conversation; the digest covers sent text only."""

    def __init__(self, path: Optional[Path] = None) -> None:
        self.path = path
        self._hash = hashlib.sha256()
        self._started = time.monotonic()
        self._log = None
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            self._log = path.open("w", encoding="utf-8")

    @classmethod
    def in_directory(cls, directory: Optional[Path], label: str) -> "Transcript":
        if directory is None:
            return cls()
        safe = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in label)
        return cls(directory / f"{safe}-{os.getpid()}-{uuid4().hex[:8]}.jsonl")

    def _elapsed_ms(self) -> int:
        return int((time.monotonic() - self._started) * 1000)

    def sent(self, text: str) -> None:
        self._hash.update(text.encode("utf-8"))
        if self._log is not None:
            _write_record(self._log, {"direction": "send", "text": text, "elapsed_ms": self._elapsed_ms()})

    def received(self, text: str) -> None:
        if self._log is not None:
            _write_record(self._log, {"direction": "recv", "text": text, "elapsed_ms": self._elapsed_ms()})

    @property
    def digest(self) -> str:
        return self._hash.hexdigest()

    def close(self) -> None:
        if self._log is not None:
            self._log.close()
            self._log = None


class SolverTransport(ABC):
    """Sends a batch of commands and returns everything the solver printed for it."""

    name: ClassVar[str]

    @abstractmethod
    def exchange(self, commands: list[str]) -> str:
        ...

    def close(self) -> None:
        """Release the underlying solver."""


class ProcessTransport(SolverTransport):
    """SMT-LIB2 over the pipes of a child process, one batch at a time."""

    name = "process"

    def __init__(
        self,
        runtime: SolverRuntimeAdapter,
        *,
        grace_seconds: float = 5.0,
        popen: Callable[..., Any] = subprocess.Popen,
    ) -> None:
        self.runtime = runtime
        self.worker = SolverWorkerState(worker_id=uuid4().hex[:8])
        self.deadline_seconds = runtime.config.timeout_s + grace_seconds
        self._popen = popen

    @staticmethod
    def _read_stream(stream: Any, output: queue.Queue[Optional[str]]) -> None:
        try:
            for line in iter(stream.readline, ""):
                output.put(line)
        finally:
            output.put(None)

    def _start(self) -> subprocess.Popen[str]:
        worker = self.worker
        command = self.runtime.build_command()
        try:
            process = self._popen(
                command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                bufsize=1,
                encoding="utf-8",
                errors="replace",
            )
        except OSError as error:
            raise SolverTransportError(
                f"cannot start {self.runtime.display_name} ({command[0]}): {error}",
                code="solver_unavailable",
            ) from error
        worker.reset_streams()
        threading.Thread(target=self._read_stream, args=(process.stdout, worker.stdout), daemon=True).start()
        threading.Thread(target=self._read_stream, args=(process.stderr, worker.stderr), daemon=True).start()
        worker.process = process
        logger.debug("started %s worker %s", self.runtime.display_name, worker.worker_id)
        return process

    def _live(self) -> subprocess.Popen[str]:
        process = self.worker.process
        if process is None:
            return self._start()
        if process.poll() is not None:
            raise SolverTransportError(
                f"{self.runtime.display_name} exited with code {process.poll()}", stderr=self.stderr_tail()
            )
        return process

    def stderr_tail(self) -> str:
        lines: list[str] = []
        while True:
            try:
                line = self.worker.stderr.get_nowait()
            except queue.Empty:
                break
            if line is None:
                break
            lines.append(line)
        return "".join(lines)[-_STDERR_TAIL:]

    def exchange(self, commands: list[str]) -> str:
        process = self._live()
        payload = "\n".join(commands) + f'\n(echo "{_MARKER}")\n'
        assert process.stdin is not None
        try:
            with self.worker.write_lock:
                process.stdin.write(payload)
                process.stdin.flush()
        except (BrokenPipeError, OSError) as error:
            tail = self.stderr_tail()
            logger.warning("solver pipe closed: %s", truncate(tail))
            raise SolverTransportError(f"cannot write to {self.runtime.display_name}: {error}", stderr=tail) from error
        lines: list[str] = []
        deadline = time.monotonic() + self.deadline_seconds
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self.close()
                raise SolverTimeoutError(
                    f"{self.runtime.display_name} did not answer within {self.deadline_seconds:.0f}s"
                )
            try:
                line = self.worker.stdout.get(timeout=min(0.5, remaining))
            except queue.Empty:
                continue
            if line is None:
                tail = self.stderr_tail()
                logger.warning("solver stdout closed: %s", truncate(tail))
                raise SolverTransportError(f"{self.runtime.display_name} closed its output", stderr=tail)
            if line.strip().strip('"') == _MARKER:
                return "".join(lines)
            lines.append(line)

    def close(self) -> None:
        process = self.worker.process
        self.worker.process = None
        if process is None or process.poll() is not None:
            return
        try:
            if process.stdin is not None:
                process.stdin.write("(exit)\n")
                process.stdin.flush()
            process.wait(timeout=2)
        except (OSError, subprocess.TimeoutExpired):
            process.terminate()
            try:
                process.wait(timeout=5)
            except subprocess.TimeoutExpired:
                process.kill()
                process.wait(timeout=5)


class EmbeddedTransport(SolverTransport):
    """The same SMT-LIB2 text evaluated by the in-process z3 library."""

    name = "embedded"

    def __init__(self) -> None:
        self.context: Optional[z3.Context] = z3.Context()

    def exchange(self, commands: list[str]) -> str:
        if self.context is None:
            raise SolverTransportError("embedded solver already closed")
        try:
            return z3.Z3_eval_smtlib2_string(self.context.ref(), "\n".join(commands))
        except z3.Z3Exception as error:
            raise SolverProtocolError(f"embedded z3 rejected input: {error}") from error

    def close(self) -> None:
        self.context = None


__all__ = ["EmbeddedTransport", "ProcessTransport", "SolverTransport", "Transcript"]

"""Mutable state owned by one solver conversation."""

from __future__ import annotations

import queue
import subprocess
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional


@dataclass(eq=False)
class SolverWorkerState:
    """One child solver process and its isolated stream queues."""

    worker_id: str
    process: Optional[subprocess.Popen[str]] = None
    stdout: queue.Queue[Optional[str]] = field(default_factory=queue.Queue)
    stderr: queue.Queue[Optional[str]] = field(default_factory=queue.Queue)
    write_lock: threading.Lock = field(default_factory=threading.Lock)

    def reset_streams(self) -> None:
        self.stdout = queue.Queue()
        self.stderr = queue.Queue()


@dataclass
class SessionStats:
    """Counters reported when a session closes; `queries` equals check-sat commands sent."""

    queries: int = 0
    seconds: float = 0.0
    outcomes: Counter[str] = field(default_factory=Counter)
    kinds: Counter[str] = field(default_factory=Counter)

    def record(self, kind: str, outcome: str, seconds: float) -> None:
        self.queries += 1
        self.seconds += seconds
        self.outcomes[outcome] += 1
        self.kinds[kind] += 1

    def merge(self, other: "SessionStats") -> None:
        self.queries += other.queries
        self.seconds += other.seconds
        self.outcomes.update(other.outcomes)
        self.kinds.update(other.kinds)

    def as_dict(self) -> dict[str, object]:
        return {
            "queries": self.queries,
            "seconds": round(self.seconds, 3),
            "outcomes": dict(sorted(self.outcomes.items())),
            "kinds": dict(sorted(self.kinds.items())),
        }


__all__ = ["SessionStats", "SolverWorkerState"]

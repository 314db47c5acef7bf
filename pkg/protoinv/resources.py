"""Run budgets: wall clock, obligation count, frame count and peak memory."""

from __future__ import annotations

import resource
import sys
import time
from typing import Callable, Optional

from .config import EngineConfig
from .errors import BudgetExceeded


def peak_memory_mb() -> float:
    """Peak resident size of this process; Linux reports KiB, macOS bytes."""

    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    if sys.platform == "darwin":
        return peak / (1024.0 * 1024.0)
    return peak / 1024.0


class Budget:
    """Limits from an EngineConfig, checked between engine steps."""

    def __init__(
        self,
        config: EngineConfig,
        *,
        clock: Callable[[], float] = time.monotonic,
        memory: Callable[[], float] = peak_memory_mb,
    ) -> None:
        self.config = config
        self._clock = clock
        self._memory = memory
        self.started = clock()

    @property
    def elapsed(self) -> float:
        return self._clock() - self.started

    def remaining_seconds(self) -> Optional[float]:
        if self.config.max_seconds is None:
            return None
        return max(0.0, self.config.max_seconds - self.elapsed)

    def check(self, *, frames: int = 0, obligations: int = 0) -> None:
        config = self.config
        if config.max_seconds is not None and self.elapsed > config.max_seconds:
            raise BudgetExceeded(f"time budget of {config.max_seconds}s exhausted", resource="time")
        if config.max_obligations is not None and obligations > config.max_obligations:
            raise BudgetExceeded(f"more than {config.max_obligations} proof obligations", resource="obligations")
        if config.max_frames is not None and frames > config.max_frames:
            raise BudgetExceeded(f"more than {config.max_frames} frames", resource="frames")
        if config.max_memory_mb is not None:
            used = self._memory()
            if used > config.max_memory_mb:
                raise BudgetExceeded(
                    f"peak memory {used:.0f} MB is over the {config.max_memory_mb} MB budget", resource="memory"
                )


__all__ = ["Budget", "peak_memory_mb"]

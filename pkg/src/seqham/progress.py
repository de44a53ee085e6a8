"""Progress of running sweep points.

Each grid point (or coupling run) is one operation, keyed like
``"hamiltonicity:0.3"``; trial counts are pushed in as workers finish and every
change is broadcast to the registered callbacks.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

logger = logging.getLogger(__name__)

Status = Literal["running", "completed"]


@dataclass
class ProgressInfo:
    operation_id: str
    total_trials: int
    completed_trials: int = 0
    failures: int = 0
    status: Status = "running"
    start_time: float = field(default_factory=time.monotonic)

    @property
    def progress_percent(self) -> float:
        if self.total_trials <= 0:
            return 0.0
        return 100.0 * self.completed_trials / self.total_trials

    @property
    def elapsed_time(self) -> float:
        return time.monotonic() - self.start_time

    @property
    def trials_per_second(self) -> float:
        elapsed = self.elapsed_time
        return self.completed_trials / elapsed if elapsed > 0 else 0.0

    @property
    def eta_seconds(self) -> int | None:
        """Seconds left at the current rate; None until a trial has finished."""
        rate = self.trials_per_second
        if self.completed_trials == 0 or rate == 0:
            return None
        return int((self.total_trials - self.completed_trials) / rate)

    def format_progress(self) -> str:
        if self.status == "completed":
            return f"complete ({self.completed_trials}/{self.total_trials}, {self.failures} failed)"
        eta = self.eta_seconds
        tail = f", ETA: {eta}s" if eta is not None else ""
        return f"{self.progress_percent:.1f}% @ {self.trials_per_second:.2f} trials/s{tail}"


ProgressCallback = Callable[[ProgressInfo], None]


class ProgressTracker:
    def __init__(self) -> None:
        self._operations: dict[str, ProgressInfo] = {}
        self._callbacks: list[ProgressCallback] = []

    def start_operation(self, operation_id: str, total_trials: int) -> ProgressInfo:
        """Begin tracking ``operation_id``; restarting an id resets its counts."""
        progress = ProgressInfo(operation_id, total_trials)
        self._operations[operation_id] = progress
        self._notify(progress)
        return progress

    def update_progress(
        self, operation_id: str, completed_trials: int, failures: int | None = None
    ) -> ProgressInfo:
        """Set the finished-trial count; reaching the total completes the operation.

        Raises:
            ValueError: If ``operation_id`` was never started
        """
        try:
            progress = self._operations[operation_id]
        except KeyError:
            raise ValueError(f"Unknown operation: {operation_id}") from None
        progress.completed_trials = completed_trials
        if failures is not None:
            progress.failures = failures
        if completed_trials >= progress.total_trials:
            progress.status = "completed"
        self._notify(progress)
        return progress

    def complete_operation(self, operation_id: str) -> None:
        progress = self._operations.get(operation_id)
        if progress is not None and progress.status != "completed":
            progress.status = "completed"
            self._notify(progress)

    def get_progress(self, operation_id: str) -> ProgressInfo | None:
        return self._operations.get(operation_id)

    def register_callback(self, callback: ProgressCallback) -> None:
        # the CLI registers log_progress once per run(); keep it single
        if callback not in self._callbacks:
            self._callbacks.append(callback)

    def _notify(self, progress: ProgressInfo) -> None:
        for callback in self._callbacks:
            try:
                callback(progress)
            except Exception:
                logger.exception("Progress callback failed for %s", progress.operation_id)


_global_tracker: ProgressTracker | None = None


def get_progress_tracker() -> ProgressTracker:
    global _global_tracker
    if _global_tracker is None:
        _global_tracker = ProgressTracker()
    return _global_tracker


def log_progress(progress: ProgressInfo) -> None:
    """Callback writing each update to the DEBUG log."""
    logger.debug("%s: %s", progress.operation_id, progress.format_progress())

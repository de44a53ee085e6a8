"""Process-wide counters and timings for the solvers.

Counter names are dotted, ``<component>.<event>`` (``posa.rotations``,
``ordered.failures.connector``). Sweep workers ship a :meth:`PerfMetrics.snapshot`
back to the parent, which folds it in with :meth:`PerfMetrics.merge`.
"""

from __future__ import annotations

import logging
import time
from collections import Counter, defaultdict
from collections.abc import Iterator, Mapping, Sequence
from contextlib import contextmanager
from typing import Any

import numpy as np

logger = logging.getLogger(__name__)

Snapshot = dict[str, dict[str, Any]]


class PerfMetrics:
    """Event counters plus raw duration samples in seconds."""

    def __init__(self) -> None:
        self.counters: Counter[str] = Counter()
        self.timings: defaultdict[str, list[float]] = defaultdict(list)

    def inc(self, name: str, amount: int = 1) -> None:
        self.counters[name] += amount

    def observe(self, name: str, value: float) -> None:
        self.timings[name].append(float(value))

    @contextmanager
    def timer(self, name: str) -> Iterator[None]:
        """Record the wall time of the ``with`` body under ``name``, even if it raises."""
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.observe(name, elapsed)
            logger.debug("%s took %.4fs", name, elapsed)

    def reset(self) -> None:
        self.counters.clear()
        self.timings.clear()

    def snapshot(self) -> Snapshot:
        """Picklable copy of the raw counters and samples."""
        return {
            "counters": dict(self.counters),
            "timings": {name: list(values) for name, values in self.timings.items()},
        }

    def merge(self, snap: Mapping[str, Mapping[str, Any]]) -> None:
        self.counters.update(snap.get("counters", {}))
        for name, values in snap.get("timings", {}).items():
            self.timings[name].extend(values)

    @staticmethod
    def _summary(values: Sequence[float]) -> dict[str, float | int]:
        arr = np.asarray(values, dtype=float)
        p50, p95 = np.percentile(arr, [50, 95])
        return {
            "min": float(arr.min()),
            "max": float(arr.max()),
            "avg": float(arr.mean()),
            "p50": float(p50),
            "p95": float(p95),
            "count": int(arr.size),
        }

    def report(self) -> dict[str, dict[str, Any]]:
        """Counters and per-name timing summaries, keys sorted for stable JSON."""
        return {
            "counters": dict(sorted(self.counters.items())),
            "timings": {name: self._summary(v) for name, v in sorted(self.timings.items()) if v},
        }


perf_metrics = PerfMetrics()

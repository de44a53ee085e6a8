"""Sweep result rows shared by the experiment harness and the coupling experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SweepRow:
    point: float
    trials: int
    successes: int
    stat: float = 0.0
    errors: int = 0

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"A sweep row needs at least one trial, got: {self.trials}")
        if not 0 <= self.successes <= self.trials:
            raise ValueError(f"successes={self.successes} outside 0..{self.trials}")

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.trials)


@dataclass(frozen=True)
class SweepResult:
    kind: str
    rows: tuple[SweepRow, ...] = field(default=())

    def points(self) -> tuple[float, ...]:
        return tuple(r.point for r in self.rows)

    def p_hats(self) -> tuple[float, ...]:
        return tuple(r.p_hat for r in self.rows)

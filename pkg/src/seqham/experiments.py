"""Parameter sweeps producing empirical threshold curves.

Every trial is a pure function of ``(spec, row, trial)``: its instance comes from the
``sweep-instance`` stream and its solver from ``sweep-solve``, both derived from the
master seed. Results are reduced by grid index, so the output does not depend on the
number of workers.
"""

from __future__ import annotations

import csv
import logging
import os
from collections.abc import Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from seqham.constants import (
    BRUTE_HAMILTON_CAP,
    COUPLING_CAP,
    CSV_COLUMNS,
    CSV_SIGNIFICANT_DIGITS,
    ENUMERATE_HAMILTON_CAP,
    ENV_BRUTE_CAP,
    ENV_ENUM_CAP,
    ENV_PATTERN_CAP,
    ENV_WORKERS,
    PATTERN_EXACT_CAP,
)
from seqham.graph_core import (
    ColorPattern,
    color_edges,
    gen_gnp,
    gen_layered,
    greedy_split,
    random_pattern,
    vertex_coloring_from_colors,
)
from seqham.ham_solver import RotationParams, brute_hamilton, enumerate_hamilton, posa_solve, validate_cycle
from seqham.inversion_lab import GreedyParams, greedy_low_inversion, inversions
from seqham.logging_config import configure_worker_logging, worker_logging_settings
from seqham.ordered_subset import OrderedParams, solve_ordered
from seqham.pattern_search import PatternProblem, coupling_trial, find_patterned
from seqham.perf_metrics import perf_metrics
from seqham.progress import get_progress_tracker
from seqham.results import SweepResult, SweepRow
from seqham.shared.rng import derive_rng, derive_seed
from seqham.shared.validators import (
    ValidationError,
    resolve_cap,
    validate_cap,
    validate_grid,
    validate_output_path,
    validate_probability,
    validate_vertex_count,
)

logger = logging.getLogger(__name__)

KINDS = (
    "hamiltonicity",
    "edge-pattern",
    "vertex-pattern",
    "ordered",
    "greedy-inversion",
    "coupling",
    "first-moment",
)


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: ``grid`` holds p values, except M values for greedy-inversion and
    edge indices t for coupling.

    ``p`` is the fixed edge probability of the kinds whose grid is not p and ``k``
    the number of colours. ``beta`` scales the edge probability of the coloured
    kinds: pattern sweeps sample G(n, β·p) and coupling includes its first t pairs
    at β·p. ``s0_size`` is the ordered list length and ``M`` the inversion budget
    of first-moment sweeps (default n).
    """

    kind: str
    n: int
    grid: tuple[float, ...]
    trials: int
    seed: int
    p: float | None = None
    k: int = 2
    beta: float = 1.0
    s0_size: int = 3
    M: int | None = None
    workers: int = 1
    params: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValidationError(f"Unknown sweep kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        validate_vertex_count(self.n, minimum=3)
        validate_grid(self.grid)
        if self.trials < 1:
            raise ValidationError(f"trials must be at least 1, got: {self.trials}")
        if self.workers < 1:
            raise ValidationError(f"workers must be at least 1, got: {self.workers}")
        if self.k < 1:
            raise ValidationError(f"k must be at least 1, got: {self.k}")
        if self.kind in ("greedy-inversion", "coupling"):
            if self.p is None:
                raise ValidationError(f"The {self.kind} sweep needs a fixed --p")
            validate_probability(self.p)
        else:
            for point in self.grid:
                validate_probability(point)
        self._check_caps()
        self.solver_params()

    def _check_caps(self) -> None:
        if self.kind == "edge-pattern" or self.kind == "vertex-pattern":
            validate_cap(self.n, resolve_cap(ENV_PATTERN_CAP, PATTERN_EXACT_CAP), f"{self.kind} sweep")
        elif self.kind == "first-moment":
            validate_cap(self.n, resolve_cap(ENV_ENUM_CAP, ENUMERATE_HAMILTON_CAP), "first-moment sweep")
        elif self.kind == "coupling":
            validate_cap(self.n, COUPLING_CAP, "coupling sweep")
            total = self.n * (self.n - 1) // 2
            if any(not 0 <= t <= total or t != int(t) for t in self.grid):
                raise ValidationError(f"Coupling grid must hold integers in 0..{total}")
        elif self.kind == "ordered" and not 1 <= self.s0_size <= self.n:
            raise ValidationError(f"s0_size must lie in 1..{self.n}")

    def solver_params(self) -> RotationParams | OrderedParams | GreedyParams | None:
        """Solver parameter dataclass for this kind with the ``--params`` overrides applied."""
        if self.kind == "hamiltonicity":
            return RotationParams().with_overrides(self.params)
        if self.kind == "ordered":
            return OrderedParams().with_overrides(self.params)
        if self.kind == "greedy-inversion":
            return GreedyParams().with_overrides(self.params)
        if self.params:
            raise ValidationError(f"The {self.kind} sweep takes no solver parameters")
        return None

    @classmethod
    def from_args(cls, args: Any, params: Mapping[str, str] | None = None) -> SweepSpec:
        """Build from a parsed CLI namespace (``--grid`` already parsed)."""
        workers = args.workers if getattr(args, "workers", None) else int(os.getenv(ENV_WORKERS, "1"))
        return cls(
            kind=args.kind,
            n=args.n,
            grid=tuple(args.grid),
            trials=args.trials,
            seed=args.seed,
            p=args.p,
            k=args.k,
            beta=args.beta,
            s0_size=args.s0_size,
            M=args.M,
            workers=workers,
            params=dict(params or {}),
        )


# One trial per kind ------------------------------------------------------------


@dataclass(frozen=True)
class TrialResult:
    success: bool
    stat: float | None = None
    error: bool = False


def _fixed_pattern(spec: SweepSpec) -> ColorPattern:
    return random_pattern(spec.n, spec.k, spec.seed)


def _hamiltonicity(spec: SweepSpec, p: float, inst: int, solve: int) -> TrialResult:
    g = gen_gnp(spec.n, p, inst)
    if spec.n <= resolve_cap(ENV_BRUTE_CAP, BRUTE_HAMILTON_CAP):
        h = brute_hamilton(g)
    else:
        h = posa_solve(g, params=spec.solver_params(), seed=solve).cycle
    return TrialResult(h is not None and validate_cycle(g, h))


def _edge_pattern(spec: SweepSpec, p: float, inst: int, solve: int) -> TrialResult:
    g = gen_gnp(spec.n, min(1.0, spec.beta * p), inst)
    ec = color_edges(g, [1.0 / spec.k] * spec.k, inst)
    prob = PatternProblem(g, edge_coloring=ec, edge_pattern=_fixed_pattern(spec))
    return TrialResult(find_patterned(prob, "exact", solve).ok)


def _vertex_pattern(spec: SweepSpec, p: float, inst: int, solve: int) -> TrialResult:
    g = gen_gnp(spec.n, min(1.0, spec.beta * p), inst)
    pattern = _fixed_pattern(spec)
    # the colour classes are a random relabelling of the pattern's multiset
    colors = derive_rng(inst, "pattern").permutation(np.array(pattern.seq))
    vc = vertex_coloring_from_colors([int(c) for c in colors])
    prob = PatternProblem(g, vertex_coloring=vc, vertex_pattern=pattern)
    return TrialResult(find_patterned(prob, "exact", solve).ok)


def _ordered(spec: SweepSpec, p: float, inst: int, solve: int) -> TrialResult:
    g = gen_gnp(spec.n, p, inst)
    s0 = derive_rng(inst, "sweep-instance", 1).choice(spec.n, size=spec.s0_size, replace=False) + 1
    outcome = solve_ordered(g, [int(v) for v in s0], spec.solver_params(), seed=solve)
    return TrialResult(outcome.ok, float(outcome.report.superpath_length) if outcome.ok else None)


def _greedy(spec: SweepSpec, M: float, inst: int, solve: int) -> TrialResult:
    lg = gen_layered(spec.n, greedy_split(spec.p), inst)
    outcome = greedy_low_inversion(lg, spec.solver_params(), seed=solve)
    if not outcome.ok:
        return TrialResult(False)
    iota = outcome.transcript.inversions
    return TrialResult(iota <= M, float(iota))


def _first_moment(spec: SweepSpec, p: float, inst: int, solve: int) -> TrialResult:
    g = gen_gnp(spec.n, p, inst)
    M = spec.M if spec.M is not None else spec.n
    found = any(inversions(h) <= M for h in enumerate_hamilton(g))
    # the stat column is reserved for the greedy and ordered kinds
    return TrialResult(found)


_RUNNERS = {
    "hamiltonicity": _hamiltonicity,
    "edge-pattern": _edge_pattern,
    "vertex-pattern": _vertex_pattern,
    "ordered": _ordered,
    "greedy-inversion": _greedy,
    "first-moment": _first_moment,
}


def run_trial(spec: SweepSpec, row: int, trial: int) -> TrialResult:
    """Run one trial; solver exceptions are recorded as errors, never raised."""
    point = spec.grid[row]
    inst = derive_seed(spec.seed, "sweep-instance", row, trial)
    solve = derive_seed(spec.seed, "sweep-solve", row, trial)
    try:
        return _RUNNERS[spec.kind](spec, point, inst, solve)
    except Exception as e:
        logger.warning("Trial %d at %s=%g failed with %s: %s", trial, spec.kind, point, type(e).__name__, e)
        return TrialResult(False, error=True)


def _run_row(spec: SweepSpec, row: int) -> tuple[list[TrialResult], dict]:
    # runs in a pool worker; its counters travel back with the results
    perf_metrics.reset()
    results = [run_trial(spec, row, trial) for trial in range(spec.trials)]
    return results, perf_metrics.snapshot()


def _coupling_rows(spec: SweepSpec) -> SweepResult:
    grid = [int(t) for t in spec.grid]
    successes = [0] * len(grid)
    pattern = _fixed_pattern(spec)
    alpha = [1.0 / spec.k] * spec.k
    beta_p = min(1.0, spec.beta * spec.p)
    tracker = get_progress_tracker()
    op = f"coupling:n={spec.n}"
    tracker.start_operation(op, spec.trials)
    for trial in range(spec.trials):
        hits = coupling_trial(spec.n, spec.p, beta_p, alpha, pattern, grid, spec.seed, trial)
        for i, hit in enumerate(hits):
            successes[i] += hit
        tracker.update_progress(op, trial + 1)
    tracker.complete_operation(op)
    perf_metrics.inc("sweep.trials", spec.trials * len(grid))
    return SweepResult("coupling", tuple(SweepRow(float(t), spec.trials, s) for t, s in zip(grid, successes)))


def _reduce(point: float, results: Sequence[TrialResult]) -> SweepRow:
    stats = [r.stat for r in results if r.stat is not None]
    return SweepRow(
        point=point,
        trials=len(results),
        successes=sum(r.success for r in results),
        stat=float(np.mean(stats)) if stats else 0.0,
        errors=sum(r.error for r in results),
    )


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Run every grid point of ``spec``; rows come back in grid order.

    With ``workers > 1`` the rows are farmed out to a process pool; the reduction is
    by grid index so the result is identical to the in-process run.
    """
    if spec.kind == "coupling":
        return _coupling_rows(spec)

    tracker = get_progress_tracker()
    rows: list[SweepRow] = []
    logger.info("Sweep %s: n=%d, %d points x %d trials", spec.kind, spec.n, len(spec.grid), spec.trials)
    if spec.workers > 1:
        with ProcessPoolExecutor(
            max_workers=spec.workers,
            initializer=configure_worker_logging,
            initargs=(worker_logging_settings(),),
        ) as pool:
            per_row: list[list[TrialResult]] | None = []
            for results, snap in pool.map(_run_row, [spec] * len(spec.grid), range(len(spec.grid))):
                perf_metrics.merge(snap)
                per_row.append(results)
    else:
        per_row = None

    for row, point in enumerate(spec.grid):
        op = f"{spec.kind}:{point:g}"
        tracker.start_operation(op, spec.trials)
        if per_row is not None:
            results = per_row[row]
            tracker.update_progress(op, len(results), failures=sum(r.error for r in results))
        else:
            results = []
            for trial in range(spec.trials):
                results.append(run_trial(spec, row, trial))
                tracker.update_progress(op, trial + 1, failures=sum(r.error for r in results))
        tracker.complete_operation(op)
        perf_metrics.inc("sweep.trials", len(results))
        rows.append(_reduce(point, results))
        logger.info("Point %g: %d/%d successes", point, rows[-1].successes, spec.trials)
    return SweepResult(spec.kind, tuple(rows))


def _fmt(value: float | int) -> str:
    if isinstance(value, int):
        return str(value)
    return f"{value:.{CSV_SIGNIFICANT_DIGITS}g}"


def emit_csv(res: SweepResult, path: str | Path) -> None:
    """Write the header and one row per grid point in the fixed column order."""
    out = validate_output_path(path)
    with open(out, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for row in res.rows:
            writer.writerow(
                [
                    _fmt(row.point),
                    _fmt(row.trials),
                    _fmt(row.successes),
                    _fmt(row.p_hat),
                    _fmt(row.stderr),
                    _fmt(row.stat),
                    _fmt(row.errors),
                ]
            )
    logger.info("Wrote %d rows to %s", len(res.rows), out)

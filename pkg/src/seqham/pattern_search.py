"""Colour-patterned Hamilton cycles.

A cycle ``H = (x_1, ..., x_n)`` follows an edge pattern ``c1`` when the i-th
traversed edge ``{x_i, x_{i+1}}`` has colour ``c1[i]`` (cyclically), and a vertex
pattern ``c2`` when ``x_i`` has colour ``c2[i]``. The presentation is free: any
starting vertex and either direction may be aligned with the pattern.

The search kernel roots every candidate at vertex 1 and tries each shift of the
pattern against it, which covers all presentations. Edges whose colour is None act
as wildcards; the coupling experiment uses them for uncoloured edges.
"""

from __future__ import annotations

import enum
import logging
import math
from collections import Counter
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from seqham.constants import (
    COUPLING_CAP,
    DEFAULT_NODE_BUDGET,
    ENV_PATTERN_CAP,
    ENV_SPREAD_CAP,
    PATTERN_EXACT_CAP,
    SPREAD_CAP,
)
from seqham.graph_core import (
    ColorPattern,
    Edge,
    EdgeColoring,
    Graph,
    VertexColoring,
    canonical_edge,
)
from seqham.ham_solver import HamCycle, enumerate_hamilton, validate_cycle
from seqham.perf_metrics import perf_metrics
from seqham.results import SweepResult, SweepRow
from seqham.shared.rng import derive_rng
from seqham.shared.validators import (
    ValidationError,
    resolve_cap,
    validate_cap,
    validate_distribution,
    validate_probability,
)

logger = logging.getLogger(__name__)


class InfeasiblePatternError(ValidationError):
    """Raised when a vertex pattern cannot be met by the vertex colour classes."""


class SearchStatus(str, enum.Enum):
    FOUND = "found"
    ABSENT = "absent"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class PatternProblem:
    """A graph with optional colourings, the patterns to follow and a rainbow flag."""

    graph: Graph
    edge_coloring: EdgeColoring | None = None
    vertex_coloring: VertexColoring | None = None
    edge_pattern: ColorPattern | None = None
    vertex_pattern: ColorPattern | None = None
    rainbow_required: bool = False

    def __post_init__(self) -> None:
        n = self.graph.n
        for name, pattern in (("edge", self.edge_pattern), ("vertex", self.vertex_pattern)):
            if pattern is not None and len(pattern) != n:
                raise ValidationError(f"The {name} pattern has length {len(pattern)}, need {n}")
        if (self.edge_pattern is not None or self.rainbow_required) and self.edge_coloring is None:
            raise ValidationError("An edge pattern or rainbow requirement needs an edge colouring")
        if self.vertex_pattern is not None:
            if self.vertex_coloring is None:
                raise ValidationError("A vertex pattern needs a vertex colouring")
            if self.vertex_coloring.n != n:
                raise ValidationError("The vertex colouring does not match the graph size")
            sizes = Counter(self.vertex_coloring.colors[1:])
            if Counter(self.vertex_pattern.seq) != sizes:
                raise InfeasiblePatternError(
                    f"Vertex pattern counts {dict(Counter(self.vertex_pattern.seq))} "
                    f"differ from class sizes {dict(sizes)}"
                )


@dataclass(frozen=True)
class PatternOutcome:
    cycle: HamCycle | None
    status: SearchStatus
    nodes: int = 0

    @property
    def ok(self) -> bool:
        return self.cycle is not None


class _BudgetHit(Exception):
    pass


def _search(
    g: Graph,
    *,
    edge_color: Mapping[Edge, int | None] | None = None,
    c1: Sequence[int] | None = None,
    vertex_color: Sequence[int] | None = None,
    c2: Sequence[int] | None = None,
    rainbow: bool = False,
    fail_first: bool = False,
    node_budget: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[tuple[int, ...] | None, int, bool]:
    """Backtracking over rooted sequences for every pattern shift.

    Returns the sequence found (rooted at 1), the node count and whether the budget
    stopped the search.
    """
    n = g.n
    if n < 3:
        return None, 0, False

    def color_of(u: int, w: int) -> int | None:
        return edge_color.get(canonical_edge(u, w)) if edge_color is not None else None

    ncol = [[]] + [[(w, color_of(v, w)) for w in g.neighbors(v)] for v in g.vertices()]
    visited = [False] * (n + 1)
    path = [1]
    used: Counter = Counter()
    nodes = 0

    def edge_ok(col: int | None, j: int, r: int) -> bool:
        if c1 is not None and col is not None and col != c1[(j + r) % n]:
            return False
        return not (rainbow and used[col] > 0)

    def vertex_ok(w: int, j: int, r: int) -> bool:
        return c2 is None or vertex_color[w] == c2[(j + r) % n]

    def stranded(u: int, w: int) -> bool:
        # u just became interior; a free neighbour of u left with < 2 usable neighbours is dead
        for x in g.neighbors(u):
            if visited[x]:
                continue
            usable = sum(1 for y in g.neighbors(x) if not visited[y] or y == w or y == 1)
            if usable < 2:
                return True
        return False

    def extend(j: int, r: int) -> bool:
        nonlocal nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise _BudgetHit
        u = path[-1]
        if j == n - 1:
            return g.has_edge(u, 1) and edge_ok(color_of(u, 1), j, r)
        cands = [
            (w, col)
            for w, col in ncol[u]
            if not visited[w] and edge_ok(col, j, r) and vertex_ok(w, j + 1, r)
        ]
        if fail_first and len(cands) > 1:
            ties = rng.random(len(cands)) if rng is not None else np.zeros(len(cands))
            onward = [sum(1 for x in g.neighbors(w) if not visited[x]) for w, _ in cands]
            order = sorted(range(len(cands)), key=lambda i: (onward[i], ties[i], cands[i][0]))
            cands = [cands[i] for i in order]
        for w, col in cands:
            visited[w] = True
            path.append(w)
            used[col] += 1
            if not (fail_first and stranded(u, w)) and extend(j + 1, r):
                return True
            used[col] -= 1
            path.pop()
            visited[w] = False
        return False

    shifts_seen: set[tuple] = set()
    for r in range(n):
        key = (
            tuple(c1[(i + r) % n] for i in range(n)) if c1 is not None else None,
            tuple(c2[(i + r) % n] for i in range(n)) if c2 is not None else None,
        )
        if key in shifts_seen:
            continue
        shifts_seen.add(key)
        if not vertex_ok(1, 0, r):
            continue
        visited[1] = True
        try:
            found = extend(0, r)
        except _BudgetHit:
            return None, nodes, True
        if found:
            return tuple(path), nodes, False
        visited[1] = False
    return None, nodes, False


def _problem_kwargs(prob: PatternProblem) -> dict:
    return {
        "edge_color": prob.edge_coloring.colors if prob.edge_coloring is not None else None,
        "c1": prob.edge_pattern.seq if prob.edge_pattern is not None else None,
        "vertex_color": prob.vertex_coloring.colors if prob.vertex_coloring is not None else None,
        "c2": prob.vertex_pattern.seq if prob.vertex_pattern is not None else None,
        "rainbow": prob.rainbow_required,
    }


def pattern_alignment(prob: PatternProblem, h: HamCycle) -> tuple[int, bool] | None:
    """Shift and direction under which ``h`` follows the problem's patterns, or None.

    Checks from scratch, independently of the search bookkeeping.
    """
    g = prob.graph
    if not validate_cycle(g, h):
        return None
    n = g.n
    if prob.rainbow_required and not check_rainbow(h, prob.edge_coloring):
        return None
    for reverse in (False, True):
        seq = h.reversed().seq if reverse else h.seq
        for r in range(n):
            if prob.edge_pattern is not None and any(
                prob.edge_coloring.color(seq[i], seq[(i + 1) % n]) != prob.edge_pattern[(i + r) % n]
                for i in range(n)
            ):
                continue
            if prob.vertex_pattern is not None and any(
                prob.vertex_coloring.color(seq[i]) != prob.vertex_pattern[(i + r) % n]
                for i in range(n)
            ):
                continue
            return r, reverse
    return None


def find_patterned(
    prob: PatternProblem,
    mode: str = "exact",
    seed: int = 0,
    *,
    node_budget: int | None = None,
    cap: int | None = None,
) -> PatternOutcome:
    """Search for a Hamilton cycle following the problem's patterns.

    ``exact`` is complete and limited to n ≤ 14 (``SEQHAM_PATTERN_CAP``). ``heuristic``
    orders moves fail-first, prunes stranded vertices and stops after ``node_budget``
    search nodes; running out is reported as BUDGET_EXHAUSTED, never as ABSENT.
    """
    if mode not in ("exact", "heuristic"):
        raise ValidationError(f"Unknown search mode: {mode}")
    n = prob.graph.n
    if mode == "exact":
        validate_cap(n, cap or resolve_cap(ENV_PATTERN_CAP, PATTERN_EXACT_CAP), "exact pattern search")
        seq, nodes, exhausted = _search(prob.graph, **_problem_kwargs(prob))
    else:
        seq, nodes, exhausted = _search(
            prob.graph,
            **_problem_kwargs(prob),
            fail_first=True,
            node_budget=node_budget or DEFAULT_NODE_BUDGET,
            rng=derive_rng(seed, "pattern", 1),
        )
    perf_metrics.inc("pattern.nodes", nodes)

    if seq is None:
        status = SearchStatus.BUDGET_EXHAUSTED if exhausted else SearchStatus.ABSENT
        if exhausted:
            logger.warning("Pattern search budget of %d nodes exhausted at n=%d", node_budget or DEFAULT_NODE_BUDGET, n)
        return PatternOutcome(None, status, nodes)

    cycle = HamCycle(seq)
    if pattern_alignment(prob, cycle) is None:
        logger.error("Pattern search returned a cycle that fails revalidation: %s", seq)
        return PatternOutcome(None, SearchStatus.ABSENT, nodes)
    return PatternOutcome(cycle, SearchStatus.FOUND, nodes)


def find_combined(
    graph: Graph,
    edge_coloring: EdgeColoring,
    vertex_coloring: VertexColoring,
    edge_pattern: ColorPattern,
    vertex_pattern: ColorPattern,
    mode: str = "exact",
    seed: int = 0,
) -> PatternOutcome:
    """Cycle whose edges follow ``edge_pattern`` and vertices ``vertex_pattern`` in one alignment."""
    prob = PatternProblem(
        graph,
        edge_coloring=edge_coloring,
        vertex_coloring=vertex_coloring,
        edge_pattern=edge_pattern,
        vertex_pattern=vertex_pattern,
    )
    return find_patterned(prob, mode, seed)


def check_rainbow(h: HamCycle, ec: EdgeColoring) -> bool:
    """True iff the n traversed edges carry n distinct colours."""
    colors = [ec.get(u, v) for u, v in h.edges()]
    return None not in colors and len(set(colors)) == len(colors)


def rainbow_probability_bound(n: int, q: int) -> float:
    """Chance that n uniform colours from ``[q]`` are all distinct (birthday bound)."""
    if q < n:
        return 0.0
    return math.exp(sum(math.log1p(-i / q) for i in range(n)))


# Spread of the coloured-Hamilton hypergraph ----------------------------------


def pattern_automorphisms(pattern: ColorPattern | Sequence[int]) -> int:
    """Number of rotations and reflections of the n-cycle that preserve the pattern."""
    c = tuple(pattern.seq if isinstance(pattern, ColorPattern) else pattern)
    n = len(c)
    rotations = sum(all(c[(i + r) % n] == c[i] for i in range(n)) for r in range(n))
    reflections = sum(all(c[(s - i) % n] == c[i] for i in range(n)) for s in range(n))
    return rotations + reflections


def colored_cycle_count(pattern: ColorPattern | Sequence[int]) -> int:
    """|ℋ| on K_n: ∏ nⱼ! / h with nⱼ the colour counts and h the automorphism count."""
    c = tuple(pattern.seq if isinstance(pattern, ColorPattern) else pattern)
    product = math.prod(math.factorial(k) for k in Counter(c).values())
    return product // pattern_automorphisms(c)


@dataclass(frozen=True)
class SpreadReport:
    h_size: int
    formula_size: int
    automorphisms: int
    kappa_hat: float
    worst_ratio: float
    worst_set: tuple[Edge, ...]
    kappa_claim: float
    bound_check: bool
    bound_violations: int
    sets_checked: int

    @property
    def formula_ok(self) -> bool:
        return self.h_size == self.formula_size

    @property
    def kappa_ok(self) -> bool:
        return self.kappa_hat >= self.kappa_claim


def spread_ratio(
    n: int,
    vertex_coloring: VertexColoring,
    pattern: ColorPattern,
    cap: int | None = None,
) -> SpreadReport:
    """Exact spread statistics of the hypergraph of pattern-coloured Hamilton cycles of K_n.

    For every nonempty S contained in some member of ℋ, φ(S) = |ℋ ∩ ⟨S⟩| is counted
    exactly; κ̂ is the minimum over those S of (|ℋ|/φ(S))^(1/|S|) and the bound
    φ(S) ≤ (2e)^s |ℋ| / (min class size)^s is checked for each.

    Raises:
        CapExceededError: If n is above the cap (default 8, ``SEQHAM_SPREAD_CAP``)
        InfeasiblePatternError: If pattern counts differ from the class sizes
    """
    validate_cap(n, cap or resolve_cap(ENV_SPREAD_CAP, SPREAD_CAP), "spread_ratio")
    if n < 3:
        raise ValidationError("Spread statistics need n >= 3")
    complete = Graph.complete(n)
    prob = PatternProblem(
        complete, vertex_coloring=vertex_coloring, vertex_pattern=pattern
    )

    pairs = list(combinations(range(1, n + 1), 2))
    bit = {e: 1 << i for i, e in enumerate(pairs)}
    members: set[int] = set()
    for h in enumerate_hamilton(complete, cap=max(n, 3)):
        if pattern_alignment(prob, h) is not None:
            members.add(sum(bit[e] for e in h.edges()))

    phi: Counter = Counter()
    for mask in members:
        sub = mask
        while sub:
            phi[sub] += 1
            sub = (sub - 1) & mask

    size = len(members)
    smallest = min(vertex_coloring.class_sizes)
    kappa_hat = math.inf
    worst_mask = 0
    violations = 0
    for sub in sorted(phi):
        s = sub.bit_count()
        count = phi[sub]
        ratio = (size / count) ** (1.0 / s)
        if ratio < kappa_hat:
            kappa_hat, worst_mask = ratio, sub
        if count > (2 * math.e) ** s * size / smallest**s * (1 + 1e-12):
            violations += 1

    worst = tuple(e for e in pairs if worst_mask & bit[e])
    alpha_min = smallest / n
    report = SpreadReport(
        h_size=size,
        formula_size=colored_cycle_count(pattern),
        automorphisms=pattern_automorphisms(pattern),
        kappa_hat=kappa_hat,
        worst_ratio=1.0 / kappa_hat if kappa_hat else math.inf,
        worst_set=worst,
        kappa_claim=alpha_min * n / (2 * math.e),
        bound_check=violations == 0,
        bound_violations=violations,
        sets_checked=len(phi),
    )
    logger.info(
        "Spread n=%d: |H|=%d kappa_hat=%.4g over %d sets", n, size, kappa_hat, len(phi)
    )
    return report


# Coupling experiment ---------------------------------------------------------


def coupling_trial(
    n: int,
    p: float,
    beta_p: float,
    alpha: Sequence[float],
    pattern: ColorPattern,
    t_grid: Sequence[int],
    seed: int,
    trial: int,
) -> list[bool]:
    """One coupled sample: for each t, whether Γ_t has a (c, t)-proper Hamilton cycle.

    All t share the same uniforms and colours, so Γ_t differs between grid points only
    in which edges use the coloured probability ``beta_p``.
    """
    pairs = list(combinations(range(1, n + 1), 2))
    rng = derive_rng(seed, "couple", trial)
    uniforms = rng.random(len(pairs))
    colors = rng.choice(len(alpha), size=len(pairs), p=np.array(alpha)) + 1
    idx = np.arange(len(pairs))
    hits = []
    for t in t_grid:
        present = np.where(idx < t, uniforms < beta_p, uniforms < p)
        edges = [pairs[i] for i in np.nonzero(present)[0]]
        g = Graph.from_edges(n, edges)
        edge_color = {pairs[i]: (int(colors[i]) if i < t else None) for i in np.nonzero(present)[0]}
        seq, nodes, _ = _search(g, edge_color=edge_color, c1=pattern.seq)
        perf_metrics.inc("pattern.nodes", nodes)
        hits.append(seq is not None)
    return hits


def coupling_monotonicity(
    n: int,
    p: float,
    beta_p: float,
    alpha: Sequence[float],
    pattern: ColorPattern,
    t_grid: Sequence[int],
    trials: int,
    seed: int,
    *,
    progress: Callable[[int], None] | None = None,
) -> SweepResult:
    """Monte Carlo estimate of P(Γ_t has a (c, t)-proper Hamilton cycle) for each t.

    Pairs of K_n are enumerated lexicographically; the first t are included with
    probability ``beta_p`` and coloured from ``alpha``, the rest with probability ``p``
    and left uncoloured.
    """
    validate_cap(n, COUPLING_CAP, "coupling_monotonicity")
    p = validate_probability(p)
    beta_p = validate_probability(beta_p, name="beta_p")
    alpha = validate_distribution(alpha)
    if len(pattern) != n:
        raise ValidationError(f"Pattern length {len(pattern)} does not match n={n}")
    total = n * (n - 1) // 2
    grid = [int(t) for t in t_grid]
    if not grid or any(not 0 <= t <= total for t in grid):
        raise ValidationError(f"Edge indices must lie in 0..{total}")

    successes = [0] * len(grid)
    for trial in range(trials):
        for i, hit in enumerate(coupling_trial(n, p, beta_p, alpha, pattern, grid, seed, trial)):
            successes[i] += hit
        if progress is not None:
            progress(trial + 1)
    rows = tuple(SweepRow(float(t), trials, s) for t, s in zip(grid, successes))
    return SweepResult("coupling", rows)

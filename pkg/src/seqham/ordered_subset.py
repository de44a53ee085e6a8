"""Hamilton cycles visiting a prescribed vertex list in order.

The pipeline builds a super-path P* that meets the listed vertices S₀ in order,
contracts it to a single protected edge e*, completes the contracted graph to a
Hamilton cycle with restricted rotations and booster edges, and expands e* back
into P*.

Layer roles: ``layers[0]`` is Γ₁ (core routing), ``layers[1]`` is Γ₂ (anchor hops),
G₁ = Γ₁ ∪ Γ₂; ``layers[2]`` (Γ₃) joins the completion graph and ``layers[3]`` (Γ₄)
supplies boosters. With only two layers the completion runs on G₁* alone.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass, field
from typing import Any

import networkx as nx

from seqham.constants import (
    ANCHOR_ATTEMPTS,
    ANCHOR_HOP_DEPTH,
    ANCHOR_MAX_LENGTH,
    CORE_FLOOR_FRACTION,
    DEFAULT_OMEGA,
    MIN_DIAMETER_BUDGET,
)
from seqham.graph_core import (
    Edge,
    Graph,
    LayeredGraph,
    canonical_edge,
    split_graph,
    split_probabilities,
)
from seqham.ham_solver import HamCycle, RotationParams, posa_solve, validate_cycle
from seqham.perf_metrics import perf_metrics
from seqham.shared.rng import derive_rng, derive_seed
from seqham.shared.validators import ValidationError, apply_overrides

logger = logging.getLogger(__name__)


class ConstructionFailure(Exception):
    """A pipeline stage could not complete; ``stage`` names it."""

    def __init__(self, stage: str, message: str, data: dict[str, Any] | None = None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.message = message
        self.data = data or {}


@dataclass(frozen=True)
class Thresholds:
    theta_small: float
    theta_tiny: float
    core_floor: int
    diameter_budget: int


@dataclass(frozen=True)
class OrderedParams:
    """Pipeline parameters; None means "derive from n and p₁" (see :meth:`resolve`)."""

    omega: float = DEFAULT_OMEGA
    p: float | None = None
    theta_small: float | None = None
    theta_tiny: float | None = None
    core_floor: float = CORE_FLOOR_FRACTION
    diameter_budget: int | None = None
    anchor_attempts: int = ANCHOR_ATTEMPTS
    max_boosters: int | None = None
    state_budget: int | None = None
    strict_order: bool = False

    def with_overrides(self, overrides: Mapping[str, Any]) -> OrderedParams:
        return apply_overrides(self, overrides)

    def resolve(self, n: int, p1: float) -> Thresholds:
        """Desk-scale thresholds.

        θ_small = 0.5·n·p₁ (a quarter of the mean G₁-degree), θ_tiny = 0.125·n·p₁,
        core floor = ⌈0.4·n⌉ and the connector budget 4·log n / log log log n rounded
        up with minimum 3 (n itself while log log log n ≤ 0).
        """
        theta_small = self.theta_small if self.theta_small is not None else 0.5 * n * p1
        theta_tiny = self.theta_tiny if self.theta_tiny is not None else 0.125 * n * p1
        budget = self.diameter_budget
        if budget is None:
            lll = math.log(math.log(math.log(n))) if n > math.e**math.e else 0.0
            budget = n if lll <= 0 else max(MIN_DIAMETER_BUDGET, math.ceil(4 * math.log(n) / lll))
        return Thresholds(theta_small, theta_tiny, math.ceil(self.core_floor * n), budget)


# Classification -------------------------------------------------------------


@dataclass(frozen=True)
class StructureReport:
    """Runtime check of the small-vertex structure the pipeline relies on."""

    small_size: int
    small_limit: float
    small_bound_ok: bool
    small_separated: bool
    no_short_cycles: bool

    @property
    def all_hold(self) -> bool:
        return self.small_bound_ok and self.small_separated and self.no_short_cycles


@dataclass
class VertexClassification:
    """SMALL is fixed; TINY only grows; AVOID = SMALL ∪ N(SMALL) ∪ TINY after every update."""

    small: frozenset[int]
    small_neighbors: frozenset[int]
    tiny0: frozenset[int]
    tiny: set[int]
    avoid: set[int]
    thresholds: Thresholds
    structure: StructureReport
    tiny_history: list[int] = field(default_factory=list)
    core_history: list[int] = field(default_factory=list)

    @property
    def theta_small(self) -> float:
        return self.thresholds.theta_small

    @property
    def theta_tiny(self) -> float:
        return self.thresholds.theta_tiny

    def add_tiny(self, vertices: Iterable[int]) -> None:
        self.tiny.update(vertices)
        self.avoid = set(self.small) | set(self.small_neighbors) | self.tiny
        self.tiny_history.append(len(self.tiny))


def _distances_within(g: Graph, source: int, depth: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        if dist[v] == depth:
            continue
        for w in g.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def _on_short_cycle(g: Graph, v: int) -> bool:
    """True iff ``v`` lies on a cycle of length 3 or 4."""
    nbrs = g.neighbors(v)
    for i, a in enumerate(nbrs):
        for b in nbrs[i + 1 :]:
            if g.has_edge(a, b):
                return True
    # two neighbours of v sharing a second common neighbour close a 4-cycle
    via: dict[int, int] = {}
    for a in nbrs:
        for w in g.neighbors(a):
            if w == v:
                continue
            if w in via and via[w] != a:
                return True
            via.setdefault(w, a)
    return False


def _structure_report(g: Graph, small: frozenset[int]) -> StructureReport:
    limit = g.n ** (1 / 3)
    separated = True
    for v in small:
        near = _distances_within(g, v, 4)
        if any(w in near for w in small if w != v):
            separated = False
            break
    return StructureReport(
        small_size=len(small),
        small_limit=limit,
        small_bound_ok=len(small) <= limit,
        small_separated=separated,
        no_short_cycles=not any(_on_short_cycle(g, v) for v in small),
    )


def classify(lg: LayeredGraph, params: OrderedParams | None = None) -> VertexClassification:
    """SMALL from G₁-degrees, TINY₀ from Γ₁-degrees, AVOID, and the structure report."""
    if len(lg.layers) < 2:
        raise ValidationError("The ordered pipeline needs at least the Γ₁ and Γ₂ layers")
    params = params or OrderedParams()
    thresholds = params.resolve(lg.n, lg.layer_probs[0])
    g1 = lg.union_of([0, 1])
    union = lg.union()
    gamma1 = lg.layers[0]

    small = frozenset(v for v in g1.vertices() if g1.degree(v) <= thresholds.theta_small)
    small_neighbors = frozenset(w for v in small for w in union.neighbors(v)) - small
    tiny0 = frozenset(v for v in gamma1.vertices() if gamma1.degree(v) <= thresholds.theta_tiny)
    cls = VertexClassification(
        small=small,
        small_neighbors=small_neighbors,
        tiny0=tiny0,
        tiny=set(),
        avoid=set(),
        thresholds=thresholds,
        # SMALL is a G₁ notion; the sparse booster layers do not count toward its structure
        structure=_structure_report(g1, small),
    )
    cls.add_tiny(tiny0)
    logger.info(
        "Classified n=%d: |SMALL|=%d |TINY0|=%d |AVOID|=%d",
        lg.n, len(small), len(tiny0), len(cls.avoid),
    )
    return cls


# Anchor paths -------------------------------------------------------


def _anchor_side(
    g1: Graph,
    gamma2: Graph,
    v: int,
    blocked: set[int],
    eligible_end,
    attempts: int,
) -> tuple[int, ...] | None:
    """Path (v, a, ..., end) with a G₁ first hop and Γ₂ hops after it."""
    tried = 0
    for a in g1.neighbors(v):
        if a in blocked:
            continue
        tried += 1
        if tried > attempts:
            break
        if eligible_end(a):
            return (v, a)
        parents = {a: v}
        frontier = [a]
        for _ in range(ANCHOR_HOP_DEPTH - 1):
            nxt = []
            for u in frontier:
                for w in gamma2.neighbors(u):
                    if w in parents or w in blocked or w == v:
                        continue
                    parents[w] = u
                    if eligible_end(w):
                        side = [w]
                        while side[-1] != v:
                            side.append(parents[side[-1]])
                        return tuple(reversed(side))
                    nxt.append(w)
            frontier = nxt
    return None


def build_anchor_paths(
    lg: LayeredGraph,
    cls: VertexClassification,
    s0_order: Sequence[int],
    params: OrderedParams | None = None,
) -> list[tuple[int, ...]]:
    """P_v for each v in S₀: ``(v)`` outside TINY, else a short path through v.

    Endpoints avoid AVOID, the rest of S₀, earlier paths and (after the first path)
    N(x₁); intermediates may lie in AVOID but never in S₀ or earlier paths.

    Raises:
        ConstructionFailure: With stage ``anchor`` when some v has no eligible path
    """
    params = params or OrderedParams()
    s0 = [int(v) for v in s0_order]
    if len(set(s0)) != len(s0):
        raise ValidationError("S0 vertices must be distinct")
    if any(not 1 <= v <= lg.n for v in s0):
        raise ValidationError(f"S0 vertices must lie in 1..{lg.n}")
    union = lg.union()
    g1, gamma2 = lg.union_of([0, 1]), lg.layers[1]
    s0_set = set(s0)
    used: set[int] = set()
    near_x1: set[int] = set()
    anchors: list[tuple[int, ...]] = []

    for idx, v in enumerate(s0):
        if v not in cls.tiny:
            path: tuple[int, ...] = (v,)
        else:
            blocked = (s0_set - {v}) | used | near_x1

            def eligible(w: int, taken: set[int] = frozenset()) -> bool:
                return w not in cls.avoid and w not in blocked and w not in taken

            x_side = _anchor_side(g1, gamma2, v, blocked, eligible, params.anchor_attempts)
            if x_side is None:
                raise ConstructionFailure("anchor", f"No x-side path for vertex {v}", {"vertex": v})
            taken = set(x_side)
            y_side = _anchor_side(
                g1, gamma2, v, blocked | taken, lambda w: eligible(w, taken), params.anchor_attempts
            )
            if y_side is None:
                raise ConstructionFailure("anchor", f"No y-side path for vertex {v}", {"vertex": v})
            path = tuple(reversed(x_side)) + y_side[1:]
            if len(path) - 1 > ANCHOR_MAX_LENGTH:
                raise ConstructionFailure("anchor", f"Anchor through {v} is too long", {"vertex": v})
            logger.debug("Anchor for tiny vertex %d: %s", v, path)
        anchors.append(path)
        used.update(path)
        if idx == 0:
            near_x1 = set(union.neighbors(path[0]))
    return anchors


# Connectors ---------------------------------------------------------


def _prune_core(
    gamma1: Graph, core: set[int], protected: set[int], theta: float
) -> set[int]:
    """Repeatedly drop unprotected core vertices with Γ₁-degree inside the core ≤ θ."""
    removed: set[int] = set()
    changed = True
    while changed:
        changed = False
        for v in sorted(core - protected):
            if sum(1 for w in gamma1.neighbors(v) if w in core) <= theta:
                core.discard(v)
                removed.add(v)
                changed = True
    return removed


def connect_paths(
    lg: LayeredGraph,
    cls: VertexClassification,
    anchors: Sequence[tuple[int, ...]],
) -> list[tuple[int, ...]]:
    """Q_v from y_v to x_{v+1} through the maintained Γ₁ core.

    Each connector is a shortest path whose first and last edges may be G₁ hops into
    the core and whose middle runs on Γ₁ inside the core; the middle is limited to the
    diameter budget. After each connector its interior leaves the core and the core
    is re-pruned into TINY.

    Raises:
        ConstructionFailure: ``core-floor`` when the core drops below the floor,
            ``connector`` when no short enough path exists
    """
    gamma1 = lg.layers[0]
    g1 = lg.union_of([0, 1])
    thresholds = cls.thresholds
    endpoints = {v for a in anchors for v in (a[0], a[-1])}
    anchor_vertices = {v for a in anchors for v in a}
    interiors = anchor_vertices - endpoints

    core = (set(gamma1.vertices()) - cls.avoid - interiors) | endpoints
    cls.add_tiny(_prune_core(gamma1, core, endpoints, thresholds.theta_tiny))
    cls.core_history.append(len(core))
    _check_floor(core, thresholds)

    gamma1_nx = gamma1.to_networkx()
    connectors: list[tuple[int, ...]] = []
    for i in range(len(anchors) - 1):
        y, x = anchors[i][-1], anchors[i + 1][0]
        free = core - anchor_vertices
        aux = nx.Graph(gamma1_nx.subgraph(sorted(free)))
        for end in (y, x):
            aux.add_node(end)
            aux.add_edges_from((end, w) for w in g1.neighbors(end) if w in free)
        if g1.has_edge(y, x):
            aux.add_edge(y, x)
        try:
            q = tuple(nx.shortest_path(aux, y, x))
        except nx.NetworkXNoPath:
            raise ConstructionFailure(
                "connector", f"No core route from {y} to {x}", {"index": i, "core": len(core)}
            )
        middle = max(len(q) - 3, 0)
        if middle > thresholds.diameter_budget:
            raise ConstructionFailure(
                "connector",
                f"Route from {y} to {x} needs {middle} core edges > {thresholds.diameter_budget}",
                {"index": i, "length": len(q) - 1},
            )
        connectors.append(q)
        core.difference_update(q[1:-1])
        anchor_vertices.update(q)
        cls.add_tiny(_prune_core(gamma1, core, endpoints, thresholds.theta_tiny))
        cls.core_history.append(len(core))
        _check_floor(core, thresholds)
    return connectors


def _check_floor(core: set[int], thresholds: Thresholds) -> None:
    if len(core) < thresholds.core_floor:
        raise ConstructionFailure(
            "core-floor",
            f"Γ₁ core shrank to {len(core)} < {thresholds.core_floor}",
            {"core": len(core)},
        )


# Super-path and contraction -----------------------------------------


@dataclass(frozen=True)
class SuperPath:
    anchor_paths: tuple[tuple[int, ...], ...]
    connectors: tuple[tuple[int, ...], ...]

    @property
    def path(self) -> tuple[int, ...]:
        """P* = (P₁, Q₁, P₂, …, P_{s₀}) with shared endpoints merged."""
        out = list(self.anchor_paths[0])
        for q, p in zip(self.connectors, self.anchor_paths[1:]):
            out.extend(q[1:])
            out.extend(p[1:])
        return tuple(out)

    @property
    def x_star(self) -> int:
        return self.anchor_paths[0][0]

    @property
    def y_star(self) -> int:
        return self.anchor_paths[-1][-1]

    def is_valid(self, g: Graph) -> bool:
        p = self.path
        return len(set(p)) == len(p) and all(g.has_edge(a, b) for a, b in zip(p, p[1:]))


@dataclass(frozen=True)
class ContractedGraph:
    """G* with P* replaced by e*; ``labels[i - 1]`` is the original label of vertex i."""

    graph: Graph
    e_star: Edge | None
    labels: tuple[int, ...]
    superpath: tuple[int, ...]

    def __iter__(self):
        return iter((self.graph, self.e_star))

    def restrict(self, layer: Graph) -> Graph:
        """Γ* for another layer: induced on the kept vertices and relabelled."""
        return layer.induced(self.labels)[0]

    def expand(self, h: HamCycle) -> HamCycle:
        """Map a cycle of G* containing e* to a cycle of G containing P* as a subpath."""
        seq = [self.labels[v - 1] for v in h.seq]
        if self.e_star is None or len(self.superpath) <= 2:
            return HamCycle.from_sequence(seq)
        x, y = self.superpath[0], self.superpath[-1]
        interior = list(self.superpath[1:-1])
        m = len(seq)
        for i in range(m):
            a, b = seq[i], seq[(i + 1) % m]
            if (a, b) == (x, y):
                return HamCycle.from_sequence(seq[: i + 1] + interior + seq[i + 1 :])
            if (a, b) == (y, x):
                return HamCycle.from_sequence(seq[: i + 1] + interior[::-1] + seq[i + 1 :])
        raise ValidationError("The cycle does not traverse e*")


def contract_superpath(g: Graph, sp: SuperPath | Sequence[int]) -> ContractedGraph:
    """Contract P* to the edge e* = {x*, y*}; edges at interior vertices disappear."""
    path = tuple(sp.path if isinstance(sp, SuperPath) else sp)
    interior = set(path[1:-1])
    kept = [v for v in g.vertices() if v not in interior]
    base, labels = g.induced(kept)
    if len(path) < 2:
        return ContractedGraph(base, None, labels, path)
    index = {v: i + 1 for i, v in enumerate(labels)}
    e_star = canonical_edge(index[path[0]], index[path[-1]])
    return ContractedGraph(base.with_edges([e_star]), e_star, labels, path)


# Completion and the full pipeline -----------------------------------------------


@dataclass
class PipelineReport:
    stage: str = "start"
    message: str = ""
    small: int = 0
    tiny0: int = 0
    tiny: int = 0
    avoid: int = 0
    structure_ok: bool | None = None
    tiny_history: list[int] = field(default_factory=list)
    min_core: int | None = None
    anchor_lengths: list[int] = field(default_factory=list)
    connector_lengths: list[int] = field(default_factory=list)
    superpath_length: int = 0
    boosters_used: int = 0
    posa_phase: str = ""

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)

    def as_text(self) -> str:
        lines = []
        for key, value in self.as_dict().items():
            if isinstance(value, list):
                value = " ".join(str(v) for v in value)
            lines.append(f"{key}={value}")
        return "\n".join(lines)


@dataclass(frozen=True)
class OrderedOutcome:
    cycle: HamCycle | None
    report: PipelineReport

    @property
    def ok(self) -> bool:
        return self.cycle is not None


def split_for_pipeline(g: Graph, params: OrderedParams, seed: int) -> LayeredGraph:
    """Four layers for a plain graph, with p taken from params or the edge density."""
    pairs = g.n * (g.n - 1) / 2
    p = params.p if params.p is not None else (g.m / pairs if pairs else 0.0)
    probs = split_probabilities(p, params.omega, g.n)
    return split_graph(g, probs, seed)


def _complete(
    lg: LayeredGraph,
    sp: SuperPath,
    params: OrderedParams,
    seed: int,
    report: PipelineReport,
) -> HamCycle:
    g1 = lg.union_of([0, 1])
    contracted = contract_superpath(g1, sp)
    solve_graph = contracted.graph
    if len(lg.layers) >= 3:
        solve_graph = Graph.from_edges(
            solve_graph.n,
            solve_graph.edge_list() + contracted.restrict(lg.layers[2]).edge_list(),
        )
    boosters: list[Edge] = []
    if len(lg.layers) >= 4:
        boosters = contracted.restrict(lg.layers[3]).edge_list()
        order = derive_rng(seed, "boosters").permutation(len(boosters))
        boosters = [boosters[i] for i in order]

    outcome = posa_solve(
        solve_graph,
        boosters,
        required_edge=contracted.e_star,
        params=RotationParams(state_budget=params.state_budget, max_boosters=params.max_boosters),
        seed=derive_seed(seed, "posa"),
        expansion_graph=contracted.graph,
    )
    report.boosters_used = outcome.diagnostics.boosters_used
    report.posa_phase = outcome.diagnostics.phase
    if not outcome.ok:
        raise ConstructionFailure(
            "completion", f"Rotation completion failed ({outcome.diagnostics.phase})",
            outcome.diagnostics.as_dict(),
        )
    return contracted.expand(outcome.cycle)


def solve_ordered(
    g: Graph | LayeredGraph,
    s0_order: Sequence[int],
    params: OrderedParams | None = None,
    seed: int = 0,
) -> OrderedOutcome:
    """Hamilton cycle of ``g`` meeting ``s0_order`` in cyclic order, or a failure report.

    A plain graph is first split into four layers with the exact conditional law.
    Every stage failure is caught here and recorded in the report with its stage tag.
    """
    params = params or OrderedParams()
    report = PipelineReport()
    s0 = tuple(int(v) for v in s0_order)
    try:
        if len(set(s0)) != len(s0) or not s0:
            raise ValidationError("S0 must be a non-empty list of distinct vertices")
        if isinstance(g, LayeredGraph):
            lg = g
        else:
            report.stage = "split"
            try:
                lg = split_for_pipeline(g, params, seed)
            except ValidationError as e:
                raise ConstructionFailure("split", str(e))
        union = lg.union()

        report.stage = "classify"
        cls = classify(lg, params)
        report.small, report.tiny0 = len(cls.small), len(cls.tiny0)
        report.structure_ok = cls.structure.all_hold

        report.stage = "anchor"
        anchors = build_anchor_paths(lg, cls, s0, params)
        report.anchor_lengths = [len(a) - 1 for a in anchors]

        report.stage = "connector"
        try:
            connectors = connect_paths(lg, cls, anchors)
        finally:
            report.tiny_history = list(cls.tiny_history)
            report.min_core = min(cls.core_history) if cls.core_history else None
            report.tiny, report.avoid = len(cls.tiny), len(cls.avoid)
        report.connector_lengths = [len(q) - 1 for q in connectors]

        report.stage = "superpath"
        sp = SuperPath(tuple(anchors), tuple(connectors))
        if not sp.is_valid(union):
            raise ConstructionFailure("superpath", "P* is not a simple path of G")
        if sp.x_star in cls.tiny or sp.y_star in cls.tiny:
            raise ConstructionFailure("superpath", "An endpoint of P* is in TINY")
        report.superpath_length = len(sp.path) - 1

        report.stage = "completion"
        cycle = _complete(lg, sp, params, seed, report)
        if not validate_cycle(union, cycle) or not validate_order(cycle, s0, strict=params.strict_order):
            raise ConstructionFailure("validation", "Expanded cycle failed revalidation")
    except ConstructionFailure as failure:
        report.stage = failure.stage
        report.message = failure.message
        perf_metrics.inc(f"ordered.failures.{failure.stage}")
        logger.warning("Ordered pipeline failed at %s: %s", failure.stage, failure.message)
        return OrderedOutcome(None, report)

    report.stage = "done"
    logger.info("Ordered pipeline succeeded with |P*|=%d", report.superpath_length)
    return OrderedOutcome(cycle, report)


def validate_order(h: HamCycle, s0_order: Sequence[int], *, strict: bool = False) -> bool:
    """True iff ``h`` visits ``s0_order`` in cyclic order (either direction unless strict)."""
    s0 = tuple(int(v) for v in s0_order)
    if not s0 or len(set(s0)) != len(s0):
        return False
    members = set(s0)
    seen = tuple(v for v in h.seq if v in members)
    if len(seen) != len(s0):
        return False

    def is_rotation(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
        i = b.index(a[0])
        return b[i:] + b[:i] == a

    return is_rotation(s0, seen) or (not strict and is_rotation(s0, seen[::-1]))


# Diagnostics ------------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionReport:
    min_slack: int
    worst_size: int
    samples: int
    g3_connected: bool
    min_degree: int


def expansion_report(
    g1_star: Graph, g3_star: Graph, samples: int = 200, max_size: int | None = None, seed: int = 0
) -> ExpansionReport:
    """Minimum of |N*(S)| − 2|S| over random vertex sets S of G₁*, plus G₃* connectivity."""
    n = g1_star.n
    max_size = max_size or max(1, n // 20)
    rng = derive_rng(seed, "posa", 1)
    best, worst_size = math.inf, 0
    for _ in range(samples):
        size = int(rng.integers(1, max_size + 1))
        chosen = set((rng.choice(n, size=size, replace=False) + 1).tolist())
        boundary = {w for v in chosen for w in g1_star.neighbors(v)} - chosen
        slack = len(boundary) - 2 * len(chosen)
        if slack < best:
            best, worst_size = slack, size
    return ExpansionReport(
        min_slack=int(best) if best != math.inf else 0,
        worst_size=worst_size,
        samples=samples,
        g3_connected=n > 0 and nx.is_connected(g3_star.to_networkx()),
        min_degree=min((g3_star.degree(v) for v in g3_star.vertices()), default=0),
    )

"""Hamiltonicity engines.

Two families live here: exhaustive oracles for small graphs (``brute_hamilton``,
``enumerate_hamilton``, ``brute_longest_path``) and the extension-rotation solver
``posa_solve``. The rotation solver works with restricted rotations: when a
protected edge e* is given, no rotation ever deletes it, so every path and every
cycle it produces contains e*.
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from seqham.constants import (
    BRUTE_HAMILTON_CAP,
    DEFAULT_CLOSURE_SOURCES,
    ENUMERATE_HAMILTON_CAP,
    ENV_BRUTE_CAP,
    ENV_ENUM_CAP,
    LONGEST_PATH_CAP,
    STATE_BUDGET_FACTOR,
)
from seqham.graph_core import Edge, Graph, canonical_edge
from seqham.perf_metrics import perf_metrics
from seqham.shared.rng import derive_rng
from seqham.shared.validators import (
    ValidationError,
    apply_overrides,
    resolve_cap,
    validate_cap,
)

logger = logging.getLogger(__name__)


def failure_report(
    message: str, *, code: str = "solver_failure", data: dict[str, Any] | None = None
) -> dict[str, Any]:
    payload: dict[str, Any] = {"error": {"code": code, "message": message}}
    if data:
        payload["error"]["data"] = data
    return payload


class RotationError(ValidationError):
    """Raised when a requested rotation is not a legal restricted rotation."""


@dataclass(frozen=True)
class HamCycle:
    """Hamilton cycle as a vertex sequence rooted at vertex 1, read cyclically."""

    seq: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.seq or self.seq[0] != 1:
            raise ValidationError(f"A cycle sequence must start at vertex 1, got: {self.seq[:5]}")
        if sorted(self.seq) != list(range(1, len(self.seq) + 1)):
            raise ValidationError("A cycle sequence must be a permutation of 1..n")

    @classmethod
    def from_sequence(cls, seq: Iterable[int]) -> HamCycle:
        """Re-root any cyclic presentation at vertex 1, keeping its direction."""
        seq = tuple(int(v) for v in seq)
        if 1 not in seq:
            raise ValidationError("A cycle sequence must contain vertex 1")
        i = seq.index(1)
        return cls(seq[i:] + seq[:i])

    @property
    def n(self) -> int:
        return len(self.seq)

    def __len__(self) -> int:
        return len(self.seq)

    def __iter__(self) -> Iterator[int]:
        return iter(self.seq)

    def edges(self) -> list[Edge]:
        """Traversed edges in order, starting with ``{seq[0], seq[1]}``."""
        n = len(self.seq)
        return [canonical_edge(self.seq[i], self.seq[(i + 1) % n]) for i in range(n)]

    def contains_edge(self, u: int, v: int) -> bool:
        return canonical_edge(u, v) in set(self.edges())

    def reversed(self) -> HamCycle:
        return HamCycle((self.seq[0], *reversed(self.seq[1:])))


def format_cycle(h: HamCycle) -> str:
    return " ".join(str(v) for v in h.seq)


def parse_cycle(text: str) -> HamCycle:
    try:
        return HamCycle.from_sequence(int(tok) for tok in text.split())
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"Malformed cycle line: {text.strip()!r}")


def validate_cycle(
    g: Graph, h: HamCycle | Sequence[int], required_edge: Sequence[int] | None = None
) -> bool:
    """True iff ``h`` is a Hamilton cycle of ``g`` rooted at 1 containing ``required_edge``."""
    seq = tuple(h.seq if isinstance(h, HamCycle) else h)
    n = g.n
    if n < 3 or len(seq) != n or seq[0] != 1:
        return False
    if sorted(seq) != list(range(1, n + 1)):
        return False
    if not all(g.has_edge(seq[i], seq[(i + 1) % n]) for i in range(n)):
        return False
    if required_edge is not None:
        u, v = required_edge
        return any({seq[i], seq[(i + 1) % n]} == {u, v} for i in range(n))
    return True


# Exhaustive oracles ---------------------------------------------------------


def _iter_hamilton_sequences(g: Graph) -> Iterator[tuple[int, ...]]:
    n = g.n
    if n < 3:
        return
    path = [1]
    visited = [False] * (n + 1)
    visited[1] = True

    def dfs() -> Iterator[tuple[int, ...]]:
        last = path[-1]
        if len(path) == n:
            if g.has_edge(last, 1):
                yield tuple(path)
            return
        for w in g.neighbors(last):
            if not visited[w]:
                visited[w] = True
                path.append(w)
                yield from dfs()
                path.pop()
                visited[w] = False

    yield from dfs()


def brute_hamilton(
    g: Graph,
    constraint: Callable[[HamCycle], bool] | None = None,
    *,
    cap: int | None = None,
) -> HamCycle | None:
    """Exhaustive search for a Hamilton cycle satisfying ``constraint``.

    Every sequence with first vertex 1 is examined, in both directions, so a
    direction-sensitive predicate sees both presentations of each cycle.

    Raises:
        CapExceededError: If ``g.n`` is above the cap (default 12, ``SEQHAM_BRUTE_CAP``)
    """
    validate_cap(g.n, cap or resolve_cap(ENV_BRUTE_CAP, BRUTE_HAMILTON_CAP), "brute_hamilton")
    for seq in _iter_hamilton_sequences(g):
        h = HamCycle(seq)
        if constraint is None or constraint(h):
            return h
    return None


def enumerate_hamilton(g: Graph, *, cap: int | None = None) -> list[HamCycle]:
    """All Hamilton cycles rooted at 1; each geometric cycle appears in both directions."""
    validate_cap(g.n, cap or resolve_cap(ENV_ENUM_CAP, ENUMERATE_HAMILTON_CAP), "enumerate_hamilton")
    return [HamCycle(seq) for seq in _iter_hamilton_sequences(g)]


def brute_longest_path(
    g: Graph, required_edge: Sequence[int] | None = None, *, cap: int = LONGEST_PATH_CAP
) -> tuple[int, ...]:
    """A longest simple path, containing ``required_edge`` when given.

    With a required edge ``{u, v}`` the path is returned oriented so that ``u`` comes
    before ``v``; an empty tuple means the edge is absent from ``g``.
    """
    validate_cap(g.n, cap, "brute_longest_path")
    best: list[int] = []
    visited = [False] * (g.n + 1)

    def grow_tail(path: list[int], on_tail: Callable[[list[int]], None]) -> None:
        on_tail(path)
        for w in g.neighbors(path[-1]):
            if not visited[w]:
                visited[w] = True
                path.append(w)
                grow_tail(path, on_tail)
                path.pop()
                visited[w] = False

    def keep(path: list[int]) -> None:
        nonlocal best
        if len(path) > len(best):
            best = list(path)

    if required_edge is None:
        for s in g.vertices():
            visited[s] = True
            grow_tail([s], keep)
            visited[s] = False
            if len(best) == g.n:
                break
        return tuple(best)

    u, v = int(required_edge[0]), int(required_edge[1])
    if not g.has_edge(u, v):
        return ()

    def grow_head(tail: list[int]) -> None:
        # Extend the front of the path; reversing keeps the same DFS helper.
        rev = tail[::-1]
        grow_tail(rev, lambda p: keep(p[::-1]))

    visited[u] = visited[v] = True
    grow_tail([u, v], grow_head)
    return tuple(best)


# Restricted rotations -------------------------------------------------------


@dataclass(frozen=True)
class RotationState:
    """A path with its first vertex held fixed, plus the rotations that produced it.

    ``end`` collects the endpoints this state has passed through; the full END set
    comes from :func:`end_set_closure`.
    """

    path: tuple[int, ...]
    protected_edge: Edge | None = None
    transcript: tuple[Edge, ...] = ()
    end: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if len(set(self.path)) != len(self.path):
            raise ValidationError("Rotation path must be simple")
        if self.protected_edge is not None and not _path_has_edge(self.path, self.protected_edge):
            raise ValidationError(f"Protected edge {self.protected_edge} is not on the path")
        if not self.end and self.path:
            object.__setattr__(self, "end", frozenset({self.path[-1]}))

    @property
    def fixed_endpoint(self) -> int:
        return self.path[0]

    @property
    def endpoint(self) -> int:
        return self.path[-1]


def _path_has_edge(path: Sequence[int], edge: Edge) -> bool:
    a, b = edge
    return any({path[i], path[i + 1]} == {a, b} for i in range(len(path) - 1))


def restricted_rotate(
    st: RotationState, pivot_edge: Sequence[int], *, graph: Graph | None = None
) -> RotationState:
    """Rotate with pivot ``{x_k, x_i}`` where ``x_k`` is the moving endpoint.

    The path ``(x_1, ..., x_i, x_{i+1}, ..., x_k)`` becomes
    ``(x_1, ..., x_i, x_k, x_{k-1}, ..., x_{i+1})``. The fixed endpoint and the vertex
    set are unchanged; the broken edge ``{x_i, x_{i+1}}`` must not be the protected one.

    Raises:
        RotationError: If the pivot is not a chord from the moving endpoint to an
            interior position, is missing from ``graph``, or would delete e*
    """
    path = st.path
    k = len(path)
    a, b = int(pivot_edge[0]), int(pivot_edge[1])
    end = path[-1]
    if end not in (a, b) or a == b:
        raise RotationError(f"Pivot {{{a},{b}}} does not touch the moving endpoint {end}")
    other = b if a == end else a
    if graph is not None and not graph.has_edge(end, other):
        raise RotationError(f"Pivot {{{a},{b}}} is not an edge of the graph")
    try:
        i = path.index(other)
    except ValueError:
        raise RotationError(f"Pivot vertex {other} is not on the path")
    if not 1 <= i <= k - 3:
        raise RotationError(f"Pivot vertex {other} sits at position {i + 1}; need 1 < i < k-1")
    broken = canonical_edge(path[i], path[i + 1])
    if st.protected_edge is not None and broken == st.protected_edge:
        raise RotationError(f"Rotation would delete the protected edge {broken}")
    new_path = path[: i + 1] + path[:i:-1]
    return RotationState(
        path=new_path,
        protected_edge=st.protected_edge,
        transcript=st.transcript + (canonical_edge(end, other),),
        end=st.end | {new_path[-1]},
    )


class _BudgetExhausted(Exception):
    pass


class _StateCounter:
    def __init__(self, budget: int):
        self.budget = budget
        self.used = 0

    def tick(self) -> None:
        self.used += 1
        if self.used > self.budget:
            raise _BudgetExhausted


def _rotation_closure(
    neighbors: Callable[[int], Iterable[int]],
    path: tuple[int, ...],
    e_star: Edge | None,
    counter: _StateCounter,
    *,
    stop: Callable[[tuple[int, ...]], bool] | None = None,
) -> tuple[dict[int, tuple[int, ...]], tuple[int, ...] | None]:
    """Breadth-first closure over endpoint-distinct rotation states.

    Returns the first path found for every reachable endpoint, and the first path
    accepted by ``stop`` (the search ends there) or None.
    """
    paths = {path[-1]: path}
    if stop is not None and stop(path):
        return paths, path
    queue = deque([path])
    while queue:
        current = queue.popleft()
        counter.tick()
        k = len(current)
        position = {v: i for i, v in enumerate(current)}
        end = current[-1]
        for w in neighbors(end):
            i = position.get(w)
            if i is None or not 1 <= i <= k - 3:
                continue
            if e_star is not None and canonical_edge(current[i], current[i + 1]) == e_star:
                continue
            new_end = current[i + 1]
            if new_end in paths:
                continue
            rotated = current[: i + 1] + current[:i:-1]
            paths[new_end] = rotated
            perf_metrics.inc("posa.rotations")
            if stop is not None and stop(rotated):
                return paths, rotated
            queue.append(rotated)
    return paths, None


@dataclass(frozen=True)
class EndClosure:
    """END set of a path together with a witness path for every endpoint."""

    end: frozenset[int]
    paths: dict[int, tuple[int, ...]] = field(hash=False)
    complete: bool
    states: int

    def __contains__(self, v: object) -> bool:
        return v in self.end

    def __len__(self) -> int:
        return len(self.end)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.end))


def end_set_closure(
    g: Graph,
    p0: Sequence[int],
    e_star: Sequence[int] | None = None,
    *,
    budget: int | None = None,
) -> EndClosure:
    """Closure of ``p0`` under restricted rotations with ``p0[0]`` held fixed.

    ``complete`` is False when the state budget (default 50·n²) ran out first, in
    which case ``end`` is a subset of the true END set.
    """
    path = tuple(int(v) for v in p0)
    if not path:
        raise ValidationError("The starting path cannot be empty")
    if any(not g.has_edge(path[i], path[i + 1]) for i in range(len(path) - 1)):
        raise ValidationError("The starting path is not a path of the graph")
    estar = canonical_edge(*e_star) if e_star is not None else None
    counter = _StateCounter(budget or STATE_BUDGET_FACTOR * g.n * g.n)
    try:
        paths, _ = _rotation_closure(g.neighbors, path, estar, counter)
        complete = True
    except _BudgetExhausted:
        # Rerun with an exact limit so the partial result is deterministic.
        paths = _partial_closure(g, path, estar, counter.budget)
        complete = False
        logger.warning("END closure budget of %d states exhausted", counter.budget)
    return EndClosure(frozenset(paths), paths, complete, min(counter.used, counter.budget))


def _partial_closure(
    g: Graph, path: tuple[int, ...], e_star: Edge | None, budget: int
) -> dict[int, tuple[int, ...]]:
    found: dict[int, tuple[int, ...]] = {}

    def record(p: tuple[int, ...]) -> bool:
        found[p[-1]] = p
        return False

    counter = _StateCounter(budget)
    try:
        _rotation_closure(g.neighbors, path, e_star, counter, stop=record)
    except _BudgetExhausted:
        pass
    return found


def posa_neighborhood(g: Graph, end: Iterable[int], fixed: int) -> frozenset[int]:
    """N*(END): neighbours of END in ``g`` outside END and the fixed endpoint."""
    end = frozenset(end)
    return frozenset(w for v in end for w in g.neighbors(v)) - end - {fixed}


# Extension-rotation solver --------------------------------------------------


def _greedy_extend(
    neighbors: Callable[[int], Iterable[int]], path: tuple[int, ...]
) -> tuple[tuple[int, ...], int]:
    """Extend at both ends until neither endpoint has an off-path neighbour."""
    on_path = set(path)
    items = list(path)
    for _ in range(2):
        while True:
            nxt = next((w for w in neighbors(items[-1]) if w not in on_path), None)
            if nxt is None:
                break
            items.append(nxt)
            on_path.add(nxt)
        items.reverse()
    return tuple(items), len(items) - len(path)


@dataclass(frozen=True)
class RotationParams:
    """Knobs of the extension-rotation solver.

    ``state_budget`` of None means 50·n² rotation states over the whole solve;
    ``max_boosters`` of None means every supplied booster may be examined.
    """

    state_budget: int | None = None
    closure_sources: int = DEFAULT_CLOSURE_SOURCES
    max_boosters: int | None = None
    random_tiebreak: bool = False

    def with_overrides(self, overrides: dict[str, Any]) -> RotationParams:
        return apply_overrides(self, overrides)


@dataclass
class SolveDiagnostics:
    phase: str = "start"
    longest_path: int = 0
    end_size: int = 0
    extensions: int = 0
    rotations_searched: int = 0
    reopenings: int = 0
    boosters_examined: int = 0
    boosters_used: int = 0
    states: int = 0
    expansion_slack: int | None = None

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class SolveOutcome:
    cycle: HamCycle | None
    diagnostics: SolveDiagnostics
    used_boosters: tuple[Edge, ...] = ()

    @property
    def ok(self) -> bool:
        return self.cycle is not None

    def report(self) -> dict[str, Any]:
        if self.ok:
            return {"cycle": format_cycle(self.cycle), **self.diagnostics.as_dict()}
        return failure_report(
            f"No Hamilton cycle found ({self.diagnostics.phase})",
            code=self.diagnostics.phase,
            data=self.diagnostics.as_dict(),
        )


class _Solver:
    """Mutable working state of one ``posa_solve`` call."""

    def __init__(
        self,
        g: Graph,
        boosters: Sequence[Edge],
        e_star: Edge | None,
        params: RotationParams,
        rng: np.random.Generator | None,
    ):
        self.n = g.n
        self.nbrs = [list(a) for a in g.adjacency]
        self.nbr_sets = [set(a) for a in g.adjacency]
        self.boosters = list(boosters)
        if params.max_boosters is not None:
            self.boosters = self.boosters[: params.max_boosters]
        self.next_booster = 0
        self.used_boosters: list[Edge] = []
        self.e_star = e_star
        self.params = params
        self.rng = rng
        self.counter = _StateCounter(params.state_budget or STATE_BUDGET_FACTOR * self.n * self.n)
        self.diag = SolveDiagnostics()

    def neighbors(self, v: int) -> Iterable[int]:
        if self.rng is None:
            return self.nbrs[v]
        return self.rng.permutation(self.nbrs[v]).tolist()

    def add_edge(self, a: int, b: int) -> None:
        if b not in self.nbr_sets[a]:
            for x, y in ((a, b), (b, a)):
                self.nbr_sets[x].add(y)
                self.nbrs[x].append(y)
                self.nbrs[x].sort()

    def graph(self) -> Graph:
        return Graph(self.n, tuple(tuple(a) for a in self.nbrs))

    def start_path(self) -> tuple[int, ...]:
        if self.e_star is not None:
            return self.e_star
        degrees = [len(a) for a in self.nbrs]
        return (max(range(1, self.n + 1), key=lambda v: (degrees[v], -v)),)

    def extend(self, path: tuple[int, ...]) -> tuple[int, ...]:
        extended, added = _greedy_extend(self.neighbors, path)
        self.diag.extensions += added
        if added:
            perf_metrics.inc("posa.extensions", added)
        return extended

    def closure(self, path: tuple[int, ...], *, look_for_extension: bool):
        self.diag.rotations_searched += 1
        stop = None
        if look_for_extension:
            on_path = set(path)

            def stop(p: tuple[int, ...]) -> bool:
                return any(w not in on_path for w in self.nbrs[p[-1]])

        return _rotation_closure(self.neighbors, path, self.e_star, self.counter, stop=stop)

    def find_extension(self, path: tuple[int, ...]):
        """Search rotations from either end for a path with an extendable endpoint."""
        paths0, found = self.closure(path, look_for_extension=True)
        if found is not None:
            return paths0, found, {}
        cache: dict[int, dict[int, tuple[int, ...]]] = {}
        for a in list(paths0)[: self.params.closure_sources]:
            flipped = paths0[a][::-1]
            ends_a, found = self.closure(flipped, look_for_extension=True)
            if found is not None:
                return paths0, found, cache
            cache[a] = ends_a
        return paths0, None, cache

    def try_close(self, path, paths0, cache) -> tuple[int, ...] | None:
        """Find a path with the same vertex set whose endpoints are joined by an edge."""
        if len(path) < 3:
            return None
        x0 = path[0]
        for y, p in paths0.items():
            if y in self.nbr_sets[x0]:
                return p

        def ends_of(a: int) -> dict[int, tuple[int, ...]]:
            if a not in cache:
                cache[a], _ = self.closure(paths0[a][::-1], look_for_extension=False)
            return cache[a]

        for a in list(paths0)[: self.params.closure_sources]:
            for b, p in ends_of(a).items():
                if b in self.nbr_sets[a]:
                    return p

        on_path = set(path)
        while self.next_booster < len(self.boosters):
            a, b = self.boosters[self.next_booster]
            self.next_booster += 1
            self.diag.boosters_examined += 1
            if a not in on_path or b not in on_path:
                continue
            closing = None
            for s, t in ((a, b), (b, a)):
                if s == x0 and t in paths0:
                    closing = paths0[t]
                elif s in paths0 and t in ends_of(s):
                    closing = ends_of(s)[t]
                if closing is not None:
                    break
            if closing is not None:
                self.add_edge(a, b)
                self.used_boosters.append(canonical_edge(a, b))
                self.diag.boosters_used += 1
                perf_metrics.inc("posa.boosters_used")
                logger.debug("Booster {%d,%d} closed a cycle of length %d", a, b, len(closing))
                return closing
        return None

    def reopen(self, cycle: tuple[int, ...]) -> tuple[int, ...] | None:
        """Break a non-Hamiltonian cycle into a longer path through an off-cycle vertex."""
        on_cycle = set(cycle)
        k = len(cycle)
        for idx in sorted(range(k), key=lambda i: cycle[i]):
            c = cycle[idx]
            w = next((u for u in self.nbrs[c] if u not in on_cycle), None)
            if w is None:
                continue
            nxt = cycle[(idx + 1) % k]
            if self.e_star is None or canonical_edge(c, nxt) != self.e_star:
                # drop {c, next}: walk from next around to c
                order = cycle[idx + 1 :] + cycle[: idx + 1]
            else:
                # drop {prev, c}: walk from prev backwards to c
                order = (cycle[idx:] + cycle[:idx])[::-1]
            self.diag.reopenings += 1
            return tuple(order) + (w,)
        return None

    def run(self) -> tuple[int, ...] | None:
        path = self.extend(self.start_path())
        while True:
            self.diag.longest_path = max(self.diag.longest_path, len(path))
            if len(path) < self.n:
                paths0, found, cache = self.find_extension(path)
                self.diag.end_size = len(paths0)
                if found is not None:
                    path = self.extend(found)
                    continue
            else:
                paths0, _ = self.closure(path, look_for_extension=False)
                cache = {}
                self.diag.end_size = len(paths0)

            cycle = self.try_close(path, paths0, cache)
            if cycle is None:
                self.diag.phase = "closure" if len(path) == self.n else "rotation"
                return None
            if len(cycle) == self.n:
                self.diag.phase = "solved"
                return cycle
            reopened = self.reopen(cycle)
            if reopened is None:
                self.diag.phase = "disconnected"
                return None
            path = self.extend(reopened)


def posa_solve(
    g: Graph,
    boosters: Sequence[Sequence[int]] = (),
    required_edge: Sequence[int] | None = None,
    params: RotationParams | None = None,
    seed: int = 0,
    *,
    expansion_graph: Graph | None = None,
) -> SolveOutcome:
    """Extension-rotation search for a Hamilton cycle containing ``required_edge``.

    The path is grown greedily from the required edge (or the highest-degree vertex),
    extended through rotation closures, and closed into a cycle with graph edges or,
    failing that, with the boosters taken strictly in the given order. A
    non-Hamiltonian cycle is reopened through an off-cycle neighbour. Success is
    certified by :func:`validate_cycle` on ``g`` plus the boosters actually used;
    failure returns ``cycle=None`` with phase diagnostics.

    ``expansion_graph`` selects the graph whose neighbourhoods feed the
    ``expansion_slack`` diagnostic, |N*(END)| − 2|END|; it defaults to ``g``.

    Raises:
        ValidationError: If ``required_edge`` is not an edge of ``g``
    """
    params = params or RotationParams()
    e_star = None
    if required_edge is not None:
        e_star = canonical_edge(required_edge[0], required_edge[1])
        if not g.has_edge(*e_star):
            raise ValidationError(f"Required edge {e_star} is not an edge of the graph")
    booster_edges = [canonical_edge(b[0], b[1]) for b in boosters]
    rng = derive_rng(seed, "posa") if params.random_tiebreak else None

    solver = _Solver(g, booster_edges, e_star, params, rng)
    if g.n < 3:
        solver.diag.phase = "trivial"
        return SolveOutcome(None, solver.diag)

    with perf_metrics.timer("posa.solve"):
        try:
            found = solver.run()
        except _BudgetExhausted:
            found = None
            solver.diag.phase = "budget"
            logger.warning("Rotation state budget of %d exhausted", solver.counter.budget)
    solver.diag.states = min(solver.counter.used, solver.counter.budget)

    if expansion_graph is not None or found is None:
        solver.diag.expansion_slack = _expansion_slack(
            expansion_graph or g, e_star, solver.counter.budget
        )

    if found is None:
        logger.debug("posa_solve failed: %s", solver.diag.as_dict())
        return SolveOutcome(None, solver.diag, tuple(solver.used_boosters))

    cycle = HamCycle.from_sequence(found)
    if not validate_cycle(solver.graph(), cycle, e_star):
        logger.error("posa_solve produced an invalid cycle; discarding it")
        solver.diag.phase = "invalid"
        return SolveOutcome(None, solver.diag, tuple(solver.used_boosters))
    return SolveOutcome(cycle, solver.diag, tuple(solver.used_boosters))


def _expansion_slack(g: Graph, e_star: Edge | None, budget: int) -> int | None:
    """|N*(END)| − 2|END| for a greedy path of ``g``; None when no such path exists."""
    if g.n < 2 or (e_star is not None and not g.has_edge(*e_star)):
        return None
    if e_star is not None:
        start: tuple[int, ...] = e_star
    else:
        start = (max(g.vertices(), key=lambda v: (g.degree(v), -v)),)
    path, _ = _greedy_extend(g.neighbors, start)
    if len(path) < 2:
        return None
    closure = end_set_closure(g, path, e_star, budget=budget)
    return len(posa_neighborhood(g, closure.end, path[0])) - 2 * len(closure.end)

"""Seeded random graphs, colourings, layered generation and file I/O.

Vertices are labelled ``1..n`` everywhere, including the file formats. Edges are
stored as ``(min, max)`` pairs. Every generator is a pure function of its
arguments: the randomness comes from :func:`seqham.shared.rng.derive_rng`.
"""

from __future__ import annotations

import bisect
import logging
import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import networkx as nx
import numpy as np

from seqham.shared.rng import derive_rng
from seqham.shared.validators import (
    ValidationError,
    validate_class_sizes,
    validate_distribution,
    validate_probability,
    validate_vertex_count,
)

logger = logging.getLogger(__name__)

Edge = tuple[int, int]


def canonical_edge(u: int, v: int) -> Edge:
    """Return the ``(min, max)`` form of an edge, rejecting self-loops."""
    u, v = int(u), int(v)
    if u == v:
        raise ValidationError(f"Self-loop at vertex {u} is not allowed")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on ``1..n``.

    ``adjacency[v]`` is the ascending neighbour tuple of ``v``; ``adjacency[0]`` is
    always empty so that indexing matches vertex labels.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, tuple(() for _ in range(n + 1)))

    @classmethod
    def complete(cls, n: int) -> Graph:
        adjacency = [()] + [
            tuple(u for u in range(1, n + 1) if u != v) for v in range(1, n + 1)
        ]
        return cls(n, tuple(adjacency))

    @classmethod
    def from_arrays(cls, n: int, us: np.ndarray, vs: np.ndarray) -> Graph:
        """Build from parallel endpoint arrays; duplicates are merged."""
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        if us.shape != vs.shape:
            raise ValidationError("Endpoint arrays must have the same length")
        if us.size == 0:
            return cls.empty(n)
        if us.min(initial=1) < 1 or vs.min(initial=1) < 1 or max(us.max(), vs.max()) > n:
            raise ValidationError(f"Edge endpoint outside 1..{n}")
        lo = np.minimum(us, vs)
        hi = np.maximum(us, vs)
        if np.any(lo == hi):
            raise ValidationError("Self-loops are not allowed")

        keys = np.unique(lo * (n + 1) + hi)
        lo, hi = keys // (n + 1), keys % (n + 1)
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        counts = np.bincount(src, minlength=n + 1)
        parts = np.split(dst, np.cumsum(counts)[:-1])
        return cls(n, tuple(tuple(part.tolist()) for part in parts))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], *, strict: bool = False) -> Graph:
        """Build from an edge iterable.

        With ``strict`` a repeated edge is an error instead of being merged.
        """
        n = validate_vertex_count(n)
        canon: list[Edge] = []
        for e in edges:
            u, v = canonical_edge(e[0], e[1])
            if not (1 <= u and v <= n):
                raise ValidationError(f"Edge {e} has a vertex outside 1..{n}")
            canon.append((u, v))
        if strict and len(set(canon)) != len(canon):
            dup = next(e for e, c in Counter(canon).items() if c > 1)
            raise ValidationError(f"Duplicate edge {dup}")
        if not canon:
            return cls.empty(n)
        arr = np.array(canon, dtype=np.int64)
        return cls.from_arrays(n, arr[:, 0], arr[:, 1])

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        if u == v or not (1 <= u <= self.n and 1 <= v <= self.n):
            return False
        nbrs = self.adjacency[u]
        i = bisect.bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    @cached_property
    def edges(self) -> frozenset[Edge]:
        return frozenset(self.edge_list())

    def edge_list(self) -> list[Edge]:
        """All edges in lexicographic order."""
        return [(u, v) for u in self.vertices() for v in self.adjacency[u] if u < v]

    def with_edges(self, extra: Iterable[Sequence[int]]) -> Graph:
        """Return a copy with additional edges (already present ones are ignored)."""
        extra = [canonical_edge(e[0], e[1]) for e in extra]
        if not extra:
            return self
        return Graph.from_edges(self.n, self.edge_list() + extra)

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
        """Induced subgraph relabelled to ``1..k`` in ascending label order.

        Returns the subgraph and ``labels`` with ``labels[i - 1]`` the original label of
        new vertex ``i``.
        """
        labels = tuple(sorted(set(vertices)))
        index = {v: i + 1 for i, v in enumerate(labels)}
        edges = [
            (index[u], index[w])
            for u in labels
            for w in self.adjacency[u]
            if u < w and w in index
        ]
        return Graph.from_edges(len(labels), edges), labels

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices())
        g.add_edges_from(self.edge_list())
        return g

    def validate(self) -> None:
        """Check the structural invariants, raising ValidationError on the first breach."""
        if len(self.adjacency) != self.n + 1 or self.adjacency[0]:
            raise ValidationError("Adjacency table does not match n")
        for v in self.vertices():
            nbrs = self.adjacency[v]
            if any(b <= a for a, b in zip(nbrs, nbrs[1:])):
                raise ValidationError(f"Neighbour list of {v} is not strictly ascending")
            for u in nbrs:
                if u == v or not 1 <= u <= self.n:
                    raise ValidationError(f"Invalid neighbour {u} of {v}")
                if not self.has_edge(u, v):
                    raise ValidationError(f"Edge {{{v},{u}}} is not symmetric")


def _merge_adjacency(graphs: Sequence[Graph]) -> Graph:
    n = graphs[0].n
    adjacency = [()] + [
        tuple(sorted(set().union(*(g.adjacency[v] for g in graphs)))) for v in range(1, n + 1)
    ]
    return Graph(n, tuple(adjacency))


@dataclass(frozen=True)
class LayeredGraph:
    """Independent layers on a common vertex set; ``layers[0]`` plays Γ₁."""

    n: int
    layers: tuple[Graph, ...]
    layer_probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ValidationError("A layered graph needs at least one layer")
        if any(layer.n != self.n for layer in self.layers):
            raise ValidationError("All layers must share the vertex count")
        if len(self.layer_probs) != len(self.layers):
            raise ValidationError("One probability per layer is required")

    def union(self) -> Graph:
        return self.union_of(range(len(self.layers)))

    def union_of(self, indices: Iterable[int]) -> Graph:
        """Union of the selected layers (0-based), e.g. ``union_of([0, 1])`` for G₁."""
        chosen = [self.layers[i] for i in indices]
        if not chosen:
            return Graph.empty(self.n)
        if len(chosen) == 1:
            return chosen[0]
        return _merge_adjacency(chosen)

    @property
    def union_probability(self) -> float:
        return 1.0 - math.prod(1.0 - p for p in self.layer_probs)


def _sample_gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    us: list[np.ndarray] = []
    vs: list[np.ndarray] = []
    if p > 0:
        for i in range(1, n):
            hits = np.nonzero(rng.random(n - i) < p)[0]
            if hits.size:
                us.append(np.full(hits.size, i, dtype=np.int64))
                vs.append(hits + i + 1)
    if not us:
        return Graph.empty(n)
    return Graph.from_arrays(n, np.concatenate(us), np.concatenate(vs))


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Sample G(n, p): each of the C(n,2) pairs independently with probability p."""
    n = validate_vertex_count(n)
    p = validate_probability(p)
    return _sample_gnp(n, p, derive_rng(seed, "gnp"))


def gen_layered(n: int, layer_probs: Sequence[float], seed: int) -> LayeredGraph:
    """Independent layers ``G(n, p_i)``, each from its own derived stream."""
    n = validate_vertex_count(n)
    if not layer_probs:
        raise ValidationError("Layer probability list cannot be empty")
    probs = tuple(validate_probability(p, name=f"p{i + 1}") for i, p in enumerate(layer_probs))
    layers = tuple(_sample_gnp(n, p, derive_rng(seed, "layer", i)) for i, p in enumerate(probs))
    logger.debug("Generated %d layers on n=%d with m=%s", len(layers), n, [g.m for g in layers])
    return LayeredGraph(n, layers, probs)


def split_probabilities(p: float, omega: float, n: int) -> tuple[float, float, float, float]:
    """Four-layer split: p₃ = p₄ = ω/4n and p₁ = p₂ with 1 − p = ∏(1 − pᵢ)."""
    p = validate_probability(p)
    p34 = omega / (4 * n)
    if p34 >= 1:
        raise ValidationError(f"omega={omega} is too large for n={n}")
    ratio = (1.0 - p) / (1.0 - p34) ** 2
    if ratio > 1.0:
        raise ValidationError(f"p={p} is below the booster layers' share 1-(1-ω/4n)^2")
    p12 = 1.0 - math.sqrt(ratio)
    return (p12, p12, p34, p34)


def greedy_split(p: float) -> tuple[float, float]:
    """Two-layer split with p₁ = p/3 and 1 − p = (1 − p₁)(1 − p₂)."""
    p = validate_probability(p)
    p1 = p / 3.0
    p2 = 1.0 - (1.0 - p) / (1.0 - p1) if p1 < 1 else 1.0
    return (p1, p2)


def split_graph(g: Graph, probs: Sequence[float], seed: int) -> LayeredGraph:
    """Assign the edges of ``g`` to layers.

    Each edge's layer set is drawn from the law of independent layers with the given
    probabilities, conditioned on the edge being in at least one of them, so the
    result is distributed like :func:`gen_layered` conditioned on its union being ``g``.
    """
    probs = tuple(validate_probability(p) for p in probs)
    if not probs or all(p == 0 for p in probs):
        raise ValidationError("At least one layer must have positive probability")
    edges = np.array(g.edge_list(), dtype=np.int64).reshape(-1, 2)
    rng = derive_rng(seed, "split")
    member = rng.random((len(edges), len(probs))) < np.array(probs)
    missing = ~member.any(axis=1)
    while missing.any():
        member[missing] = rng.random((int(missing.sum()), len(probs))) < np.array(probs)
        missing = ~member.any(axis=1)
    layers = tuple(
        Graph.from_arrays(g.n, edges[member[:, i], 0], edges[member[:, i], 1])
        for i in range(len(probs))
    )
    return LayeredGraph(g.n, layers, probs)


@dataclass(frozen=True)
class EdgeColoring:
    """Colour ``1..k`` for every edge of a graph."""

    k: int
    colors: Mapping[Edge, int] = field(hash=False)

    def color(self, u: int, v: int) -> int:
        return self.colors[canonical_edge(u, v)]

    def get(self, u: int, v: int) -> int | None:
        return self.colors.get(canonical_edge(u, v))

    def covers(self, g: Graph) -> bool:
        return set(self.colors) == set(g.edges) and all(
            1 <= c <= self.k for c in self.colors.values()
        )


def color_edges(g: Graph, alpha: Sequence[float], seed: int) -> EdgeColoring:
    """Give each edge an independent colour drawn from ``alpha`` over ``[k]``."""
    alpha = validate_distribution(alpha)
    edges = g.edge_list()
    rng = derive_rng(seed, "edge-colors")
    draws = rng.choice(len(alpha), size=len(edges), p=np.array(alpha)) + 1
    return EdgeColoring(len(alpha), dict(zip(edges, draws.tolist())))


def rainbow_color_edges(g: Graph, q: int, seed: int) -> EdgeColoring:
    """Give each edge an independent uniform colour from ``[q]``."""
    if int(q) < 1:
        raise ValidationError(f"Palette size q must be at least 1, got: {q}")
    edges = g.edge_list()
    rng = derive_rng(seed, "rainbow")
    draws = rng.integers(1, int(q) + 1, size=len(edges))
    return EdgeColoring(int(q), dict(zip(edges, draws.tolist())))


@dataclass(frozen=True)
class VertexColoring:
    """Colour of each vertex; ``colors[0]`` is a placeholder."""

    palette: int
    colors: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.colors) - 1

    @property
    def class_sizes(self) -> tuple[int, ...]:
        counts = Counter(self.colors[1:])
        return tuple(counts.get(c, 0) for c in range(1, self.palette + 1))

    def color(self, v: int) -> int:
        return self.colors[v]

    def vertex_class(self, c: int) -> tuple[int, ...]:
        return tuple(v for v in range(1, self.n + 1) if self.colors[v] == c)


def color_vertices_block(n: int, class_sizes: Sequence[int]) -> VertexColoring:
    """Block colouring: the first β₁n labels get colour 1, the next β₂n colour 2, …"""
    n = validate_vertex_count(n)
    sizes = validate_class_sizes(n, class_sizes)
    colors = [0]
    for c, size in enumerate(sizes, start=1):
        colors.extend([c] * size)
    return VertexColoring(len(sizes), tuple(colors))


def vertex_coloring_from_colors(colors: Sequence[int]) -> VertexColoring:
    """Colouring from the per-vertex colours of vertices ``1..n`` in order."""
    if not colors or any(int(c) < 1 for c in colors):
        raise ValidationError("Vertex colours must be positive integers")
    return VertexColoring(max(colors), (0, *(int(c) for c in colors)))


@dataclass(frozen=True)
class ColorPattern:
    """Target colour sequence **c** = (c₁, …, c_n)."""

    seq: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.seq:
            raise ValidationError("A colour pattern cannot be empty")
        if any(int(c) < 1 for c in self.seq):
            raise ValidationError(f"Pattern colours must be positive, got: {self.seq}")

    def __len__(self) -> int:
        return len(self.seq)

    def __getitem__(self, i: int) -> int:
        return self.seq[i]

    @property
    def counts(self) -> dict[int, int]:
        return dict(Counter(self.seq))


def random_pattern(n: int, k: int, seed: int) -> ColorPattern:
    """Uniformly random pattern of length n over ``[k]``."""
    rng = derive_rng(seed, "pattern")
    return ColorPattern(tuple(rng.integers(1, k + 1, size=n).tolist()))


# File formats -------------------------------------------------------------


def _parse_ints(line: str, lineno: int, path: Path) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise ValidationError(f"{path}:{lineno}: malformed line {line.strip()!r}")


def write_graph(g: Graph, path: str | Path, coloring: EdgeColoring | None = None) -> None:
    """Write ``n m`` then one ``u v`` (or ``u v c``) line per edge."""
    path = Path(path)
    lines = [f"{g.n} {g.m}"]
    for u, v in g.edge_list():
        if coloring is None:
            lines.append(f"{u} {v}")
        else:
            lines.append(f"{u} {v} {coloring.color(u, v)}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def read_colored_graph(path: str | Path) -> tuple[Graph, EdgeColoring | None]:
    """Read a graph file; a third column, if present on every edge line, is a colour."""
    path = Path(path)
    rows = [
        (i, line)
        for i, line in enumerate(path.read_text(encoding="ascii").splitlines(), start=1)
        if line.strip()
    ]
    if not rows:
        raise ValidationError(f"{path}: empty graph file")
    header = _parse_ints(rows[0][1], rows[0][0], path)
    if len(header) != 2:
        raise ValidationError(f"{path}:1: header must be 'n m'")
    n, m = header
    n = validate_vertex_count(n)
    if len(rows) - 1 != m:
        raise ValidationError(f"{path}: header announces {m} edges, found {len(rows) - 1}")

    edges: list[Edge] = []
    colors: dict[Edge, int] = {}
    seen: set[Edge] = set()
    for lineno, line in rows[1:]:
        fields = _parse_ints(line, lineno, path)
        if len(fields) not in (2, 3):
            raise ValidationError(f"{path}:{lineno}: expected 'u v' or 'u v c'")
        u, v = fields[0], fields[1]
        if u == v:
            raise ValidationError(f"{path}:{lineno}: self-loop at vertex {u}")
        if not (1 <= u <= n and 1 <= v <= n):
            raise ValidationError(f"{path}:{lineno}: vertex outside 1..{n}")
        e = canonical_edge(u, v)
        if e in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate edge {e}")
        seen.add(e)
        edges.append(e)
        if len(fields) == 3:
            colors[e] = fields[2]

    g = Graph.from_edges(n, edges)
    if colors and len(colors) != len(edges):
        raise ValidationError(f"{path}: either all or no edges carry a colour")
    coloring = EdgeColoring(max(colors.values()), colors) if colors else None
    return g, coloring


def read_graph(path: str | Path) -> Graph:
    return read_colored_graph(path)[0]


def write_vertex_coloring(vc: VertexColoring, path: str | Path) -> None:
    lines = [f"{v} {vc.color(v)}" for v in range(1, vc.n + 1)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_vertex_coloring(path: str | Path) -> VertexColoring:
    """Read ``v c`` lines; every vertex 1..n must appear exactly once."""
    path = Path(path)
    found: dict[int, int] = {}
    for lineno, line in enumerate(path.read_text(encoding="ascii").splitlines(), start=1):
        if not line.strip():
            continue
        fields = _parse_ints(line, lineno, path)
        if len(fields) != 2:
            raise ValidationError(f"{path}:{lineno}: expected 'v c'")
        v, c = fields
        if v in found:
            raise ValidationError(f"{path}:{lineno}: vertex {v} coloured twice")
        found[v] = c
    n = len(found)
    if sorted(found) != list(range(1, n + 1)):
        raise ValidationError(f"{path}: vertices must be exactly 1..{n}")
    return vertex_coloring_from_colors([found[v] for v in range(1, n + 1)])


def write_pattern(pattern: ColorPattern, path: str | Path) -> None:
    Path(path).write_text(" ".join(str(c) for c in pattern.seq) + "\n", encoding="ascii")


def read_pattern(path: str | Path) -> ColorPattern:
    path = Path(path)
    text = path.read_text(encoding="ascii").strip()
    if not text or "\n" in text:
        raise ValidationError(f"{path}: a pattern file holds exactly one line")
    return ColorPattern(tuple(_parse_ints(text, 1, path)))


def read_vertex_list(path: str | Path) -> tuple[int, ...]:
    """Read one line of space-separated vertex labels (the S₀ order file)."""
    path = Path(path)
    text = path.read_text(encoding="ascii").strip()
    if not text or "\n" in text:
        raise ValidationError(f"{path}: an order file holds exactly one line")
    order = tuple(_parse_ints(text, 1, path))
    if len(set(order)) != len(order):
        raise ValidationError(f"{path}: vertex labels must be distinct")
    return order

"""Inversions of Hamilton cycles.

Inversion counting, the Lehmer-code bijection, exact and log-space counts of
inversion-bounded permutations, the threshold formulas built on them, and the greedy
leftmost-neighbour walk that produces low-inversion Hamilton cycles.

A cycle is read as the sequence rooted at vertex 1; ``inversions`` uses the
direction as stored and ``inversions_min_direction`` takes the better of the two.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from itertools import accumulate
from pathlib import Path
from typing import Any

import numpy as np
from scipy import stats
from scipy.special import gammaln

from seqham.constants import BRUTE_HAMILTON_CAP, MIN_U_TARGET
from seqham.graph_core import EdgeColoring, Graph, LayeredGraph
from seqham.ham_solver import (
    HamCycle,
    RotationParams,
    brute_hamilton,
    posa_solve,
    validate_cycle,
)
from seqham.pattern_search import check_rainbow
from seqham.perf_metrics import perf_metrics
from seqham.shared.validators import ValidationError, apply_overrides

logger = logging.getLogger(__name__)


class _Fenwick:
    """Binary indexed tree over positions ``1..size``."""

    def __init__(self, size: int, fill: int = 0):
        self.size = size
        self.tree = [0] * (size + 1)
        if fill:
            for i in range(1, size + 1):
                self.tree[i] += fill
                j = i + (i & -i)
                if j <= size:
                    self.tree[j] += self.tree[i]

    def add(self, i: int, delta: int) -> None:
        while i <= self.size:
            self.tree[i] += delta
            i += i & -i

    def prefix(self, i: int) -> int:
        total = 0
        while i > 0:
            total += self.tree[i]
            i -= i & -i
        return total

    def find_kth(self, k: int) -> int:
        """Smallest i with prefix(i) >= k (k is 1-based)."""
        pos = 0
        step = 1 << self.size.bit_length()
        while step:
            nxt = pos + step
            if nxt <= self.size and self.tree[nxt] < k:
                pos = nxt
                k -= self.tree[nxt]
            step >>= 1
        return pos + 1


# Inversions -------------------------------------------------------------------


def _sequence(h: HamCycle | Sequence[int]) -> list[int]:
    return list(h.seq if isinstance(h, HamCycle) else h)


def _merge_count(values: list[int]) -> tuple[list[int], int]:
    if len(values) <= 1:
        return values, 0
    mid = len(values) // 2
    left, a = _merge_count(values[:mid])
    right, b = _merge_count(values[mid:])
    merged: list[int] = []
    count = a + b
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            count += len(left) - i
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, count


def inversions(h: HamCycle | Sequence[int]) -> int:
    """Number of pairs k < l with seq[k] > seq[l], by merge counting."""
    return _merge_count(_sequence(h))[1]


def inversions_pair_scan(h: HamCycle | Sequence[int]) -> int:
    """Quadratic reference count of :func:`inversions`."""
    seq = _sequence(h)
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])


def inversions_min_direction(h: HamCycle) -> int:
    return min(inversions(h), inversions(h.reversed()))


# Lehmer codes -----------------------------------------------------------------


@dataclass(frozen=True)
class LehmerCode:
    """``mu[j - 1]`` is μ_j, the number of smaller values placed after value j."""

    mu: tuple[int, ...]

    def __post_init__(self) -> None:
        for j, m in enumerate(self.mu, start=1):
            if not 0 <= m < j:
                raise ValidationError(f"Code entry mu_{j}={m} outside 0..{j - 1}")

    @property
    def total(self) -> int:
        return sum(self.mu)


def _check_permutation(perm: Sequence[int]) -> list[int]:
    values = [int(v) for v in perm]
    if sorted(values) != list(range(1, len(values) + 1)):
        raise ValidationError(f"Not a permutation of 1..{len(values)}: {tuple(values)}")
    return values


def lehmer_encode(perm: Sequence[int]) -> LehmerCode:
    """Code of ``perm``: μ_k counts the values smaller than k that appear after k."""
    values = _check_permutation(perm)
    seen = _Fenwick(len(values))
    mu = [0] * len(values)
    for v in reversed(values):
        mu[v - 1] = seen.prefix(v - 1)
        seen.add(v, 1)
    return LehmerCode(tuple(mu))


def lehmer_decode(code: LehmerCode | Sequence[int]) -> tuple[int, ...]:
    """Permutation built by inserting 1, 2, ..., n with k in front of μ_k placed values.

    Later insertions never change the relative order of smaller values, so among
    1..k the value k ends up at rank k - 1 - μ_k. Filling from n down, k takes that
    rank among the still free positions.
    """
    mu = code.mu if isinstance(code, LehmerCode) else LehmerCode(tuple(int(m) for m in code)).mu
    n = len(mu)
    free = _Fenwick(n, fill=1)
    perm = [0] * n
    for k in range(n, 0, -1):
        pos = free.find_kth(k - mu[k - 1])
        perm[pos - 1] = k
        free.add(pos, -1)
    return tuple(perm)


# Counting -----------------------------------------------------------------------


def _mahonian_row(n: int, cap: int) -> list[int]:
    """Counts of permutations of [n] with exactly m inversions, for m = 0..cap."""
    row = [1] + [0] * cap
    for j in range(2, n + 1):
        # μ_j ranges over 0..j-1: a window sum of width j over the previous row
        prefix = [0, *accumulate(row)]
        row = [prefix[m + 1] - prefix[max(0, m - j + 1)] for m in range(cap + 1)]
    return row


def count_inversion_bounded(n: int, M: int) -> int:
    """Exact number of permutations of [n] with at most M inversions."""
    if n < 1 or M < 0:
        raise ValidationError(f"Need n >= 1 and M >= 0, got n={n}, M={M}")
    cap = min(M, n * (n - 1) // 2)
    return sum(_mahonian_row(n, cap))


def inversion_histogram(n: int) -> list[int]:
    """Full Mahonian row: entry m counts permutations of [n] with m inversions."""
    if n < 1:
        raise ValidationError(f"Need n >= 1, got n={n}")
    return _mahonian_row(n, n * (n - 1) // 2)


def first_moment_log_bound(n: int, M: int, p: float) -> float:
    """log of C(M+n, n)·pⁿ; -inf at p = 0."""
    if p <= 0:
        return -math.inf
    log_binom = gammaln(M + n + 1) - gammaln(n + 1) - gammaln(M + 1)
    return float(log_binom + n * math.log(p))


def first_moment_bound(n: int, M: int, p: float) -> float:
    """min(1, C(M+n, n)·pⁿ): a union bound on the chance of a cycle with ≤ M inversions."""
    if n < 1 or M < 0 or not 0 <= p <= 1:
        raise ValidationError(f"Invalid first-moment arguments n={n}, M={M}, p={p}")
    log_bound = first_moment_log_bound(n, M, p)
    return 0.0 if log_bound == -math.inf else min(1.0, math.exp(min(log_bound, 0.0)))


def p_epsilon(n: int, M: int, eps: float) -> float:
    """(1 − ε)·n / (e·M), below which low-inversion cycles are unlikely."""
    if M <= 0:
        raise ValidationError(f"M must be positive, got: {M}")
    return (1.0 - eps) * n / (math.e * M)


def restricted_class_size(n: int, M: int) -> int:
    """Codes with μ_j < min(j, ⌊M/n⌋): equals q!·q^(n−q) for q = ⌊M/n⌋ ≤ n."""
    if M < n:
        raise ValidationError(f"The restricted class needs M >= n, got n={n}, M={M}")
    q = M // n
    if q >= n:
        return math.factorial(n)
    return math.factorial(q) * q ** (n - q)


def restricted_class_size_log(n: int, M: int) -> float:
    """Analytic log size with x = M/n real: log Γ(x + 1) + (n − x)·log x."""
    if M < n:
        raise ValidationError(f"The restricted class needs M >= n, got n={n}, M={M}")
    x = M / n
    return float(gammaln(x + 1) + (n - x) * math.log(x))


def size_upper_S(n: int, M: int, s: int, v2: int) -> int:
    """Upper bound on restricted cycles through an edge set S of size s.

    ``v2`` is the number of path-start vertices of S with label ≤ ⌊M/n⌋. The bound is
    q^(n − q − s + v2)·(q − v2)! with q = ⌊M/n⌋; a negative exponent is clamped to 0.
    """
    q = min(M // n, n) if M >= n else 0
    if q < 1:
        raise ValidationError(f"The restricted class needs M >= n, got n={n}, M={M}")
    if not 0 <= v2 <= min(s, q):
        raise ValidationError(f"v2={v2} must lie in 0..min(s, M/n)")
    return q ** max(0, n - q - s + v2) * math.factorial(q - v2)


@dataclass(frozen=True)
class RatioCheck:
    s: int
    log_ratio: float
    log_claim: float

    @property
    def ok(self) -> bool:
        return self.log_ratio >= self.log_claim - 1e-9


def restricted_ratio_checks(n: int, M: int, s_max: int) -> list[RatioCheck]:
    """Worst log(|ℋ| / bound(S)) over v2 for each s ≤ s_max, against s·log(M/(e·n))."""
    full = math.log(restricted_class_size(n, M))
    q = min(M // n, n)
    checks = []
    for s in range(s_max + 1):
        worst = min(full - math.log(size_upper_S(n, M, s, v2)) for v2 in range(min(s, q) + 1))
        checks.append(RatioCheck(s, worst, s * math.log(M / (math.e * n))))
    return checks


def fknp_threshold(r: int | float, kappa: float, C: float = 1.0) -> float:
    """C·log(r)/κ capped at 1: the spread-based sufficient edge probability."""
    if r < 2 or kappa <= 0:
        raise ValidationError(f"Need r >= 2 and kappa > 0, got r={r}, kappa={kappa}")
    return min(1.0, C * math.log(r) / kappa)


def greedy_bound(n: int, p1: float) -> float:
    """2n/p₁ + 16·log²n/p₁², the typical inversion count of a completed greedy cycle."""
    return 2 * n / p1 + 16 * math.log(n) ** 2 / p1**2


@dataclass(frozen=True)
class GeometricFit:
    statistic: float
    pvalue: float
    dof: int
    mean: float
    expected_mean: float


def geometric_fit(a_values: Iterable[int], p1: float, min_expected: float = 5.0) -> GeometricFit:
    """Chi-square fit of non-negative counts to Geo(p₁) − 1.

    Bins are 0, 1, ..., K − 1 and a tail ≥ K, with K the largest value keeping the
    expected tail count at least ``min_expected``.
    """
    values = np.asarray(list(a_values), dtype=np.int64)
    if values.size == 0:
        raise ValidationError("geometric_fit needs at least one value")
    if not 0 < p1 < 1:
        raise ValidationError(f"p1 must lie in (0, 1), got: {p1}")
    total = values.size
    q = 1.0 - p1
    k = 1
    while total * q ** (k + 1) >= min_expected and total * q**k * p1 >= min_expected:
        k += 1
    expected = np.array([total * q**i * p1 for i in range(k)] + [total * q**k])
    observed = np.array(
        [np.count_nonzero(values == i) for i in range(k)] + [np.count_nonzero(values >= k)],
        dtype=float,
    )
    result = stats.chisquare(observed, expected)
    return GeometricFit(
        statistic=float(result.statistic),
        pvalue=float(result.pvalue),
        dof=k,
        mean=float(values.mean()),
        expected_mean=q / p1,
    )


# Greedy low-inversion walk --------------------------------------------------------


@dataclass(frozen=True)
class GreedyParams:
    """``u_target`` of None means round(2·log n / p₁) with floor 4."""

    u_target: int | None = None
    state_budget: int | None = None
    brute_cap: int = BRUTE_HAMILTON_CAP

    def with_overrides(self, overrides: Mapping[str, Any]) -> GreedyParams:
        return apply_overrides(self, overrides)

    def resolve_u_target(self, n: int, p1: float) -> int:
        if self.u_target is not None:
            target = self.u_target
        elif p1 <= 0:
            target = n - 1
        else:
            target = max(MIN_U_TARGET, round(2 * math.log(n) / p1))
        return max(0, min(target, n - 1))


@dataclass
class GreedyTranscript:
    walk: tuple[int, ...] = ()
    unvisited: tuple[int, ...] = ()
    j0: int = 0
    j1: int | None = None
    a: tuple[int, ...] = ()
    alpha: tuple[int, ...] = ()
    u_target: int = 0
    stuck: bool = False
    completion: str = "pending"
    inversions: int | None = None
    rainbow: bool | None = None

    @property
    def inversion_bound(self) -> int:
        """Σ α_j over the walk plus |U|·(n − j₁)."""
        n = len(self.walk) + len(self.unvisited)
        tail = len(self.unvisited) * (n - self.j1) if self.j1 is not None else 0
        return sum(self.alpha) + tail

    def a_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.a).items()))

    def as_text(self) -> str:
        fields = {
            "j0": self.j0,
            "j1": self.j1,
            "u_target": self.u_target,
            "unvisited": len(self.unvisited),
            "stuck": self.stuck,
            "completion": self.completion,
            "inversions": self.inversions,
            "inversion_bound": self.inversion_bound,
            "sum_a": sum(self.a),
            "sum_alpha": sum(self.alpha),
            "rainbow": self.rainbow,
        }
        return "\n".join(f"{k}={v}" for k, v in fields.items())


def write_a_histogram(transcript: GreedyTranscript, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["value", "count"])
        for value, count in transcript.a_histogram().items():
            writer.writerow([value, count])


@dataclass(frozen=True)
class GreedyOutcome:
    cycle: HamCycle | None
    transcript: GreedyTranscript

    @property
    def ok(self) -> bool:
        return self.cycle is not None


def leftmost_walk(g1: Graph, u_target: int) -> GreedyTranscript:
    """Walk from 1, always to the smallest unvisited G₁-neighbour, until |U| = u_target.

    a_j counts the unvisited labels below v_j when v_j is chosen.
    """
    n = g1.n
    visited = [False] * (n + 1)
    unvisited_below = _Fenwick(n, fill=1)
    walk = [1]
    a = [0]
    visited[1] = True
    unvisited_below.add(1, -1)
    stuck = False
    while n - len(walk) > u_target:
        nxt = next((w for w in g1.neighbors(walk[-1]) if not visited[w]), None)
        if nxt is None:
            stuck = True
            break
        a.append(unvisited_below.prefix(nxt - 1))
        visited[nxt] = True
        unvisited_below.add(nxt, -1)
        walk.append(nxt)
    unvisited = tuple(v for v in range(1, n + 1) if not visited[v])
    return GreedyTranscript(
        walk=tuple(walk),
        unvisited=unvisited,
        j0=len(walk),
        j1=unvisited[0] if unvisited else None,
        a=tuple(a),
        u_target=u_target,
        stuck=stuck,
    )


def _alpha(seq: Sequence[int], upto: int) -> tuple[int, ...]:
    """α_j = |{k > j : v_k < v_j}| for the first ``upto`` positions of ``seq``."""
    later = _Fenwick(len(seq))
    counts = [0] * len(seq)
    for j in range(len(seq) - 1, -1, -1):
        counts[j] = later.prefix(seq[j] - 1)
        later.add(seq[j], 1)
    return tuple(counts[:upto])


def _complete_through(
    g: Graph, g2: Graph, walk: tuple[int, ...], unvisited: tuple[int, ...], params: GreedyParams
) -> tuple[tuple[int, ...] | None, str]:
    """Hamilton path of G₂[U] joining a neighbour of the walk's end to one of vertex 1.

    Two terminals s, t join the U-vertices adjacent in G to v_{j₀} and to v₁
    respectively; a Hamilton cycle of G₂[U] + {s, t} through the edge {s, t} is
    such a path.
    """
    first, last = walk[0], walk[-1]
    if not unvisited:
        return (walk, "closed") if g.has_edge(last, first) and len(walk) >= 3 else (None, "no-closing-edge")
    sub, labels = g2.induced(unvisited)
    u = len(labels)
    s, t = u + 1, u + 2
    from_end = [i + 1 for i, v in enumerate(labels) if g.has_edge(last, v)]
    to_start = [i + 1 for i, v in enumerate(labels) if g.has_edge(first, v)]
    if not from_end or not to_start:
        return None, "no-attachment"
    extra = [(s, w) for w in from_end] + [(t, w) for w in to_start] + [(s, t)]
    aux = Graph.from_edges(u + 2, sub.edge_list() + extra)

    if aux.n <= params.brute_cap:
        h = brute_hamilton(aux, lambda c: c.contains_edge(s, t), cap=params.brute_cap)
        phase = "brute"
    else:
        outcome = posa_solve(aux, required_edge=(s, t), params=RotationParams(state_budget=params.state_budget))
        h, phase = outcome.cycle, f"posa-{outcome.diagnostics.phase}"
    if h is None:
        return None, phase
    # orient the aux cycle as s -> ... -> t, then drop the terminals
    seq = list(h.seq)
    i = seq.index(s)
    seq = seq[i:] + seq[:i]
    if seq[-1] != t:
        seq = [s] + seq[1:][::-1]
    path = tuple(labels[v - 1] for v in seq[1:-1])
    return walk + path, phase


def greedy_low_inversion(
    lg: LayeredGraph,
    params: GreedyParams | None = None,
    seed: int = 0,
    *,
    coloring: EdgeColoring | None = None,
) -> GreedyOutcome:
    """Leftmost-neighbour walk on G₁ completed through the unvisited set with G₂.

    The walk itself is deterministic; ``seed`` only matters when a rotation search is
    needed for the completion. On success the transcript records ι(H) in the direction
    built (walk first) and, with ``coloring``, whether the cycle is rainbow.
    """
    if len(lg.layers) != 2:
        raise ValidationError(f"greedy_low_inversion needs exactly two layers, got {len(lg.layers)}")
    params = params or GreedyParams()
    g1, g2 = lg.layers
    union = lg.union()
    n = lg.n
    if n < 3:
        raise ValidationError(f"A Hamilton cycle needs n >= 3, got n={n}")

    with perf_metrics.timer("greedy.solve"):
        transcript = leftmost_walk(g1, params.resolve_u_target(n, lg.layer_probs[0]))
        if transcript.stuck:
            logger.debug("Walk stuck at j0=%d with |U|=%d", transcript.j0, len(transcript.unvisited))
        seq, phase = _complete_through(union, g2, transcript.walk, transcript.unvisited, params)
    transcript.completion = phase

    if seq is None:
        transcript.alpha = _alpha(transcript.walk + transcript.unvisited, transcript.j0)
        logger.info(
            "Greedy completion failed (%s) with |U|=%d", phase, len(transcript.unvisited)
        )
        perf_metrics.inc("greedy.failures")
        return GreedyOutcome(None, transcript)

    cycle = HamCycle(tuple(seq))
    if not validate_cycle(union, cycle):
        logger.error("Greedy construction produced an invalid cycle; discarding it")
        transcript.completion = "invalid"
        return GreedyOutcome(None, transcript)
    transcript.alpha = _alpha(cycle.seq, transcript.j0)
    transcript.inversions = inversions(cycle)
    if coloring is not None:
        transcript.rainbow = check_rainbow(cycle, coloring)
    logger.info("Greedy cycle with %d inversions (j0=%d)", transcript.inversions, transcript.j0)
    return GreedyOutcome(cycle, transcript)

"""Desk-scale acceptance checks: oracle agreement, exact counts and Monte Carlo curves.

Deselected by default; run with ``pytest -m slow``.
"""

import math
from itertools import permutations, product

import numpy as np
import pytest
from scipy import stats

from seqham.experiments import SweepSpec, run_sweep
from seqham.graph_core import (
    ColorPattern,
    color_edges,
    color_vertices_block,
    gen_gnp,
    gen_layered,
    greedy_split,
    random_pattern,
    split_probabilities,
)
from seqham.ham_solver import (
    brute_hamilton,
    brute_longest_path,
    end_set_closure,
    enumerate_hamilton,
    posa_neighborhood,
    posa_solve,
    validate_cycle,
)
from seqham.inversion_lab import (
    GreedyParams,
    count_inversion_bounded,
    first_moment_bound,
    geometric_fit,
    greedy_bound,
    greedy_low_inversion,
    inversions,
    inversions_pair_scan,
    leftmost_walk,
    lehmer_decode,
    lehmer_encode,
    p_epsilon,
    restricted_class_size,
)
from seqham.ordered_subset import (
    ConstructionFailure,
    OrderedParams,
    build_anchor_paths,
    classify,
    connect_paths,
    solve_ordered,
    split_for_pipeline,
    validate_order,
)
from seqham.pattern_search import PatternProblem, coupling_monotonicity, find_patterned, pattern_alignment, spread_ratio
from seqham.shared.rng import derive_rng

pytestmark = pytest.mark.slow


def _within(low_row, high_row, sigmas=3.0):
    """high.p_hat is not below low.p_hat by more than ``sigmas`` pooled standard errors."""
    pooled = math.sqrt(low_row.stderr**2 + high_row.stderr**2)
    return high_row.p_hat >= low_row.p_hat - sigmas * max(pooled, 1e-12)


def _draws(count, n_range, p_range, tag):
    rng = derive_rng(0, tag)
    for i in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        p = float(rng.uniform(*p_range))
        yield i, n, p


class TestHamiltonOracles:
    def test_solver_agrees_with_exhaustive_search(self):
        for i, n, p in _draws(1000, (4, 9), (0.2, 0.8), "oracle"):
            g = gen_gnp(n, p, seed=i)
            outcome = posa_solve(g, seed=i)
            exact = brute_hamilton(g)
            if outcome.ok:
                assert validate_cycle(g, outcome.cycle)
                assert exact is not None
            if exact is None:
                assert not outcome.ok

    def test_single_vertex_order_whenever_a_cycle_exists(self):
        """A one-vertex S₀ imposes no order, so the pipeline must match the plain solver."""
        checked = 0
        for seed in range(20):
            g = gen_gnp(60, 0.15, seed=seed)
            if not posa_solve(g, seed=seed).ok:
                continue
            outcome = solve_ordered(g, [1], seed=seed)
            assert outcome.ok, (seed, outcome.report.stage)
            assert validate_cycle(g, outcome.cycle)
            checked += 1
        assert checked >= 10

    def test_end_neighbourhood_bound(self):
        """|N*(END)| <= 2|END| + 1 for longest paths through a protected edge."""
        checked = 0
        for i, n, p in _draws(300, (4, 9), (0.2, 0.7), "posa-bound"):
            g = gen_gnp(n, p, seed=i)
            if g.m == 0:
                continue
            e = g.edge_list()[0]
            p0 = brute_longest_path(g, e)
            closure = end_set_closure(g, p0, e)
            if not closure.complete:
                continue
            n_star = posa_neighborhood(g, closure.end, p0[0])
            assert len(n_star) <= 2 * len(closure.end) + 1, (i, p0)
            checked += 1
        assert checked > 250


class TestLehmerSuite:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_exhaustive(self, n):
        histogram = [0] * (n * (n - 1) // 2 + 1)
        for perm in permutations(range(1, n + 1)):
            code = lehmer_encode(perm)
            assert lehmer_decode(code) == perm
            iota = inversions_pair_scan(perm)
            assert code.total == iota
            histogram[iota] += 1
        running = np.cumsum(histogram)
        for M, expected in enumerate(running):
            assert count_inversion_bounded(n, M) == expected

    @pytest.mark.parametrize("n, M", [(6, 12), (8, 16), (8, 24)])
    def test_restricted_class_matches_enumeration(self, n, M):
        q = M // n
        codes = list(product(*(range(min(j, q)) for j in range(1, n + 1))))
        assert all(sum(code) <= M for code in codes)
        assert restricted_class_size(n, M) == len(codes)


class TestFirstMoment:
    def test_low_inversion_cycles_are_rare_below_threshold(self):
        n, M = 8, 8
        p = p_epsilon(n, M, 0.5)
        seeds = 2000
        hits = sum(
            any(inversions(h) <= M for h in enumerate_hamilton(gen_gnp(n, p, seed=s)))
            for s in range(seeds)
        )
        p_hat = hits / seeds
        stderr = math.sqrt(p_hat * (1 - p_hat) / seeds)
        assert p_hat <= first_moment_bound(n, M, p) + 3 * stderr


class TestPatterns:
    @pytest.mark.parametrize("n", [4, 6, 8])
    @pytest.mark.parametrize("pattern_kind", ["block", "alternating"])
    def test_spread_inequalities(self, n, pattern_kind):
        vc = color_vertices_block(n, [n // 2, n // 2])
        if pattern_kind == "block":
            pattern = ColorPattern(vc.colors[1:])
        else:
            pattern = ColorPattern(tuple(1 + i % 2 for i in range(n)))
        report = spread_ratio(n, vc, pattern)
        assert report.formula_ok
        assert report.kappa_ok
        assert report.bound_check

    def test_exact_search_agrees_with_enumeration(self):
        for i, n, p in _draws(200, (3, 8), (0.3, 0.9), "pattern-oracle"):
            g = gen_gnp(n, p, seed=i)
            prob = PatternProblem(
                g,
                edge_coloring=color_edges(g, [0.5, 0.5], seed=i),
                edge_pattern=random_pattern(n, 2, seed=i),
            )
            exact = brute_hamilton(g, lambda h: pattern_alignment(prob, h) is not None)
            assert find_patterned(prob, "exact", seed=i).ok == (exact is not None), i

    def test_coupling_is_monotone(self):
        n, p = 7, 0.4
        total = n * (n - 1) // 2
        res = coupling_monotonicity(
            n, p, 2 * p, [0.5, 0.5], random_pattern(n, 2, seed=3), [0, total // 2, total], 2000, seed=3
        )
        rows = res.rows
        assert _within(rows[0], rows[1])
        assert _within(rows[1], rows[2])

    def test_scaled_coloured_curve_dominates_plain_curve(self):
        grid = (0.3, 0.4, 0.5)
        plain = run_sweep(SweepSpec(kind="hamiltonicity", n=8, grid=grid, trials=400, seed=11))
        coloured = run_sweep(
            SweepSpec(kind="edge-pattern", n=8, grid=grid, trials=400, seed=11, k=2, beta=2.0)
        )
        for a, b in zip(plain.rows, coloured.rows):
            assert _within(a, b)


class TestConstructions:
    def test_ordered_pipeline_at_desk_scale(self):
        n, p, s0_size, seeds = 500, 0.025, 10, 50
        successes = 0
        for seed in range(seeds):
            g = gen_gnp(n, p, seed=seed)
            s0 = [int(v) for v in derive_rng(seed, "s0").choice(n, size=s0_size, replace=False) + 1]
            outcome = solve_ordered(g, s0, seed=seed)
            if outcome.ok:
                successes += 1
                assert validate_cycle(g, outcome.cycle)
                assert validate_order(outcome.cycle, s0)
        assert successes >= 0.8 * seeds

    def test_small_vertex_structure_at_desk_scale(self):
        n, p, seeds = 500, 0.025, 400
        probs = split_probabilities(p, 2.0, n)
        held = {"small_bound_ok": 0, "small_separated": 0, "no_short_cycles": 0}
        for seed in range(seeds):
            report = classify(gen_layered(n, probs, seed=seed)).structure
            for name in held:
                held[name] += getattr(report, name)
        for name, count in held.items():
            assert count >= 0.9 * seeds, (name, count)

    def test_connectors_at_desk_scale(self):
        n, p, s0_size, seeds = 500, 0.025, 10, 50
        params = OrderedParams()
        successes = 0
        for seed in range(seeds):
            g = gen_gnp(n, p, seed=seed)
            s0 = [int(v) for v in derive_rng(seed, "s0").choice(n, size=s0_size, replace=False) + 1]
            lg = split_for_pipeline(g, params, seed)
            cls = classify(lg, params)
            try:
                anchors = build_anchor_paths(lg, cls, s0, params)
                connectors = connect_paths(lg, cls, anchors)
            except ConstructionFailure:
                continue
            successes += 1
            assert all(max(len(q) - 3, 0) <= cls.thresholds.diameter_budget for q in connectors)
            interiors = [v for path in (*anchors, *connectors) for v in path[1:-1]]
            assert len(interiors) == len(set(interiors))
            assert min(cls.core_history) >= cls.thresholds.core_floor
        assert successes >= 0.8 * seeds

    def test_walk_skips_fit_geometric_law(self):
        """Each skip count reads fresh Γ₁ pairs, so a batch of them is Geometric(p₁) − 1."""
        n, batches = 2000, 20
        p1, _ = greedy_split(0.1)
        u_target = GreedyParams().resolve_u_target(n, p1)
        passed = 0
        for seed in range(batches):
            t = leftmost_walk(gen_gnp(n, p1, seed=seed), u_target)
            fit = geometric_fit(t.a[1:], p1)
            passed += fit.statistic < stats.chi2.ppf(0.999, fit.dof)
        assert passed >= 0.95 * batches

    def test_greedy_walk_at_desk_scale(self):
        n, p, seeds = 5000, 0.1, 50
        p1, _ = greedy_split(p)
        completed = 0
        a_values: list[int] = []
        for seed in range(seeds):
            outcome = greedy_low_inversion(gen_layered(n, greedy_split(p), seed=seed), seed=seed)
            t = outcome.transcript
            a_values.extend(t.a[1:])
            if outcome.ok:
                completed += 1
                assert t.inversions <= greedy_bound(n, p1)
                assert t.inversions <= t.inversion_bound
        assert completed >= 0.9 * seeds
        expected = (1 - p1) / p1
        assert abs(np.mean(a_values) - expected) <= 0.05 * expected

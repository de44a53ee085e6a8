"""Tests for the ordered-subset pipeline: classification, anchors, connectors, contraction."""

import sys
from pathlib import Path

import pytest

# Add src to path
repo_root = Path(__file__).resolve().parents[2]
src_path = repo_root / "src"
if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))

from seqham.graph_core import Graph, LayeredGraph, gen_layered
from seqham.ham_solver import HamCycle, validate_cycle
from seqham.ordered_subset import (
    ConstructionFailure,
    OrderedParams,
    PipelineReport,
    SuperPath,
    build_anchor_paths,
    classify,
    connect_paths,
    contract_superpath,
    expansion_report,
    solve_ordered,
    validate_order,
)
from seqham.shared import ValidationError


def _clique_on(n, vertices):
    vs = sorted(vertices)
    return [(a, b) for i, a in enumerate(vs) for b in vs[i + 1 :]]


class TestValidateOrder:
    """Test the cyclic-order validator."""

    def test_forward(self):
        assert validate_order(HamCycle((1, 4, 2, 5, 3, 6)), (1, 2, 3))

    def test_reverse_direction(self):
        h = HamCycle((1, 4, 3, 5, 2, 6))
        assert validate_order(h, (1, 2, 3))
        assert not validate_order(h, (1, 2, 3), strict=True)

    def test_rotation_of_order(self):
        assert validate_order(HamCycle((1, 4, 2, 5, 3, 6)), (2, 3, 1))

    def test_both_directions_fail(self):
        assert not validate_order(HamCycle((1, 3, 2, 4)), (1, 2, 3, 4))

    def test_missing_vertex(self):
        assert not validate_order(HamCycle((1, 2, 3)), (1, 5))


class TestParams:
    """Test threshold resolution."""

    def test_small_n_defaults(self):
        th = OrderedParams().resolve(10, 1.0)
        assert th.theta_small == pytest.approx(5.0)
        assert th.theta_tiny == pytest.approx(1.25)
        assert th.core_floor == 4
        assert th.diameter_budget == 10

    def test_large_n_budget(self):
        assert OrderedParams().resolve(10**6, 0.001).diameter_budget == 58

    def test_explicit_values_win(self):
        params = OrderedParams().with_overrides({"theta_tiny": "3", "diameter_budget": "4"})
        th = params.resolve(100, 0.1)
        assert th.theta_tiny == 3.0
        assert th.diameter_budget == 4


class TestClassify:
    """Test SMALL, TINY and AVOID."""

    def test_complete_layers_have_no_small_vertices(self):
        cls = classify(gen_layered(8, [1.0, 1.0], seed=0))
        assert cls.small == frozenset()
        assert cls.tiny == set()
        assert cls.structure.all_hold

    def test_isolated_in_core_layer_is_tiny(self):
        gamma1 = Graph.from_edges(6, _clique_on(6, range(1, 6)))
        gamma2 = Graph.from_edges(6, [(6, v) for v in range(1, 6)])
        cls = classify(LayeredGraph(6, (gamma1, gamma2), (0.5, 0.5)))
        assert 6 in cls.tiny0
        assert 6 not in cls.small
        assert 6 in cls.avoid

    def test_avoid_tracks_tiny_updates(self):
        cls = classify(gen_layered(8, [1.0, 1.0], seed=0))
        cls.add_tiny([3])
        assert cls.avoid == {3}
        assert cls.tiny_history[-1] == 1

    def test_structure_checked_on_core_layers(self):
        """A triangle closed only by a third-layer edge does not count against a SMALL vertex."""
        cycle = [(v, v + 1) for v in range(2, 9)] + [(9, 2)]
        gamma1 = Graph.from_edges(9, cycle + [(1, 2)])
        gamma3 = Graph.from_edges(9, [(1, 3)])
        lg = LayeredGraph(9, (gamma1, Graph.empty(9), gamma3), (0.5, 0.5, 0.1))
        cls = classify(lg, OrderedParams(theta_small=1, theta_tiny=0))
        assert cls.small == frozenset({1})
        assert cls.small_neighbors == frozenset({2, 3})
        assert cls.structure.no_short_cycles
        assert cls.structure.small_separated

    def test_core_layer_triangle_is_reported(self):
        cycle = [(v, v + 1) for v in range(2, 9)] + [(9, 2)]
        gamma1 = Graph.from_edges(9, cycle + [(1, 2)])
        gamma2 = Graph.from_edges(9, [(1, 3)])
        cls = classify(LayeredGraph(9, (gamma1, gamma2), (0.5, 0.5)), OrderedParams(theta_small=2, theta_tiny=0))
        assert 1 in cls.small
        assert not cls.structure.no_short_cycles

    def test_needs_two_layers(self):
        with pytest.raises(ValidationError):
            classify(LayeredGraph(4, (Graph.complete(4),), (0.5,)))


class TestAnchorPaths:
    """Test anchor path construction."""

    def test_non_tiny_vertices_are_trivial(self):
        lg = gen_layered(8, [1.0, 1.0], seed=0)
        cls = classify(lg)
        assert build_anchor_paths(lg, cls, (3, 1, 6)) == [(3,), (1,), (6,)]

    def test_two_neighbour_vertex(self):
        """A tiny vertex with two eligible neighbours gets the 2-edge path through it."""
        gamma1 = Graph.from_edges(7, _clique_on(7, range(2, 8)) + [(1, 2), (1, 3)])
        lg = LayeredGraph(7, (gamma1, Graph.empty(7)), (0.5, 0.5))
        params = OrderedParams(theta_small=0, theta_tiny=2)
        cls = classify(lg, params)
        assert cls.tiny == {1}
        assert build_anchor_paths(lg, cls, (1,), params) == [(2, 1, 3)]

    def test_isolated_vertex_fails(self):
        gamma1 = Graph.from_edges(6, _clique_on(6, range(1, 6)))
        lg = LayeredGraph(6, (gamma1, Graph.empty(6)), (0.5, 0.5))
        params = OrderedParams(theta_small=0, theta_tiny=0.5)
        cls = classify(lg, params)
        with pytest.raises(ConstructionFailure) as exc:
            build_anchor_paths(lg, cls, (6,), params)
        assert exc.value.stage == "anchor"
        assert exc.value.data == {"vertex": 6}

    def test_duplicate_s0_rejected(self):
        lg = gen_layered(5, [1.0, 1.0], seed=0)
        with pytest.raises(ValidationError):
            build_anchor_paths(lg, classify(lg), (1, 1))


class TestConnectors:
    """Test core routing between anchors."""

    def test_adjacent_anchors_use_direct_edges(self):
        lg = gen_layered(8, [1.0, 1.0], seed=0)
        cls = classify(lg)
        connectors = connect_paths(lg, cls, [(1,), (2,), (3,)])
        assert connectors == [(1, 2), (2, 3)]
        assert cls.core_history[0] == 8

    def test_single_anchor_needs_no_connector(self):
        lg = gen_layered(8, [1.0, 1.0], seed=0)
        assert connect_paths(lg, classify(lg), [(1,)]) == []

    def test_unreachable_anchor(self):
        edges = _clique_on(10, range(1, 6)) + _clique_on(10, range(6, 11))
        g = Graph.from_edges(10, edges)
        lg = LayeredGraph(10, (g, Graph.empty(10)), (0.5, 0.5))
        params = OrderedParams(theta_small=0, theta_tiny=0)
        with pytest.raises(ConstructionFailure) as exc:
            connect_paths(lg, classify(lg, params), [(1,), (6,)])
        assert exc.value.stage == "connector"

    def test_core_floor(self):
        lg = gen_layered(8, [1.0, 1.0], seed=0)
        cls = classify(lg, OrderedParams(core_floor=1.5))
        with pytest.raises(ConstructionFailure) as exc:
            connect_paths(lg, cls, [(1,), (2,)])
        assert exc.value.stage == "core-floor"


    @pytest.mark.parametrize("seed", range(10))
    def test_core_and_tiny_histories(self, seed):
        """The core only shrinks, TINY only grows and the core never drops below its floor."""
        lg = gen_layered(120, [0.08, 0.08], seed=seed)
        cls = classify(lg, OrderedParams(theta_tiny=5))
        s0 = [v for v in range(1, 121) if v not in cls.tiny][:6]
        anchors = build_anchor_paths(lg, cls, s0, OrderedParams(theta_tiny=5))
        try:
            connectors = connect_paths(lg, cls, anchors)
        except ConstructionFailure as exc:
            assert exc.stage in ("connector", "core-floor")
            connectors = None

        assert all(a >= b for a, b in zip(cls.core_history, cls.core_history[1:]))
        assert all(a <= b for a, b in zip(cls.tiny_history, cls.tiny_history[1:]))
        if connectors is None:
            return
        assert min(cls.core_history) >= cls.thresholds.core_floor
        interiors = [set(p[1:-1]) for p in anchors] + [set(q[1:-1]) for q in connectors]
        seen: set[int] = set()
        for part in interiors:
            assert not part & seen
            seen |= part
        for q in connectors:
            assert not set(q[1:-1]) & cls.avoid
        assert SuperPath(tuple(anchors), tuple(connectors)).is_valid(lg.union())

    def test_connectors_usually_succeed_on_dense_layers(self):
        successes = 0
        for seed in range(10):
            lg = gen_layered(120, [0.08, 0.08], seed=seed)
            params = OrderedParams(theta_tiny=5)
            cls = classify(lg, params)
            s0 = [v for v in range(1, 121) if v not in cls.tiny][:6]
            try:
                connect_paths(lg, cls, build_anchor_paths(lg, cls, s0, params))
            except ConstructionFailure:
                continue
            successes += 1
        assert successes >= 5


class TestContraction:
    """Test super-paths and their contraction."""

    def test_superpath_merges_shared_endpoints(self):
        sp = SuperPath(((2, 1, 3), (5,)), ((3, 4, 5),))
        assert sp.path == (2, 1, 3, 4, 5)
        assert (sp.x_star, sp.y_star) == (2, 5)
        assert sp.is_valid(Graph.complete(5))
        assert not sp.is_valid(Graph.from_edges(5, [(1, 2)]))

    def test_contract_and_expand(self):
        contracted = contract_superpath(Graph.complete(5), (1, 5, 2))
        assert contracted.graph.n == 4
        assert contracted.e_star == (1, 2)
        assert contracted.labels == (1, 2, 3, 4)
        assert contracted.graph.m == 6
        assert contracted.expand(HamCycle((1, 2, 3, 4))).seq == (1, 5, 2, 3, 4)
        assert contracted.expand(HamCycle((1, 4, 3, 2))).seq == (1, 4, 3, 2, 5)

    def test_single_vertex_superpath(self):
        g = Graph.complete(5)
        graph, e_star = contract_superpath(g, (3,))
        assert graph == g
        assert e_star is None

    def test_expand_needs_e_star(self):
        contracted = contract_superpath(Graph.complete(6), (1, 6, 2))
        with pytest.raises(ValidationError):
            contracted.expand(HamCycle((1, 3, 2, 4, 5)))


class TestSolveOrdered:
    """Test the full pipeline."""

    def test_single_vertex_order(self):
        outcome = solve_ordered(Graph.complete(6), (1,))
        assert outcome.ok
        assert outcome.report.stage == "done"
        assert validate_cycle(Graph.complete(6), outcome.cycle)

    def test_three_vertices_in_order(self):
        g = Graph.complete(10)
        outcome = solve_ordered(g, (1, 2, 3), seed=4)
        assert outcome.ok
        assert validate_cycle(g, outcome.cycle)
        assert validate_order(outcome.cycle, (1, 2, 3))
        assert outcome.report.superpath_length == 2

    def test_scattered_order(self):
        g = Graph.complete(10)
        outcome = solve_ordered(g, (4, 2, 7), seed=1)
        assert outcome.ok
        assert validate_order(outcome.cycle, (4, 2, 7))

    def test_layered_input(self):
        lg = gen_layered(12, [1.0, 1.0], seed=2)
        outcome = solve_ordered(lg, (5, 9, 2))
        assert outcome.ok
        assert validate_order(outcome.cycle, (5, 9, 2))

    def test_disconnected_graph_fails(self):
        edges = _clique_on(10, range(1, 6)) + _clique_on(10, range(6, 11))
        outcome = solve_ordered(Graph.from_edges(10, edges), (1, 6))
        assert not outcome.ok
        assert outcome.report.stage != "done"
        assert outcome.report.message

    def test_report_text(self):
        report = PipelineReport(stage="connector", tiny_history=[1, 2])
        text = report.as_text()
        assert "stage=connector" in text
        assert "tiny_history=1 2" in text


class TestExpansionReport:
    def test_complete_graph(self):
        report = expansion_report(Graph.complete(10), Graph.complete(10), samples=20)
        assert report.min_slack == 7
        assert report.g3_connected
        assert report.min_degree == 9

"""Command-line entrypoint for seqham.

Exit codes: 0 on success, 2 when a solver declares failure or the input is
infeasible, 1 on usage or validation errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any

from seqham.constants import DEFAULT_LOG_HANDLER, DEFAULT_LOG_LEVEL, ENV_WORKERS
from seqham.experiments import SweepSpec, emit_csv, run_sweep
from seqham.graph_core import (
    ColorPattern,
    Graph,
    LayeredGraph,
    color_edges,
    color_vertices_block,
    gen_gnp,
    gen_layered,
    greedy_split,
    random_pattern,
    rainbow_color_edges,
    read_colored_graph,
    read_graph,
    read_pattern,
    read_vertex_coloring,
    read_vertex_list,
    write_graph,
)
from seqham.ham_solver import (
    RotationParams,
    brute_hamilton,
    failure_report,
    format_cycle,
    posa_solve,
)
from seqham.inversion_lab import (
    GreedyParams,
    count_inversion_bounded,
    first_moment_bound,
    greedy_low_inversion,
    p_epsilon,
    restricted_class_size,
    write_a_histogram,
)
from seqham.logging_config import DEFAULT_LOG_FORMAT, HANDLER_TYPES, configure_logging
from seqham.ordered_subset import OrderedParams, solve_ordered
from seqham.pattern_search import (
    InfeasiblePatternError,
    PatternProblem,
    coupling_monotonicity,
    find_patterned,
    spread_ratio,
)
from seqham.perf_metrics import perf_metrics
from seqham.progress import get_progress_tracker, log_progress
from seqham.shared.retry import retry_over_seeds
from seqham.shared.rng import SCHEME, derive_rng
from seqham.shared.validators import (
    ValidationError,
    parse_grid,
    parse_key_values,
    validate_class_sizes,
    validate_probability,
    validate_vertex_count,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="Master seed (default 0; mandatory for sweep)")
    common.add_argument(
        "--params",
        action="append",
        default=[],
        metavar="KEY=VAL",
        help="Solver parameter override; may be repeated",
    )
    common.add_argument(
        "--log-level",
        default=os.getenv("SEQHAM_LOG_LEVEL", DEFAULT_LOG_LEVEL),
        help="Logging level (default: %(default)s)",
    )
    common.add_argument(
        "--log-format",
        default=os.getenv("SEQHAM_LOG_FORMAT", DEFAULT_LOG_FORMAT),
        help="Logging format string",
    )
    common.add_argument(
        "--log-handler",
        default=os.getenv("SEQHAM_LOG_HANDLER", DEFAULT_LOG_HANDLER),
        choices=HANDLER_TYPES,
        help="Logging handler (default: %(default)s)",
    )
    common.add_argument(
        "--metrics", action="store_true", help="Print solver metrics as JSON on stderr"
    )
    return common


def _add_instance_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", help="Graph file ('n m' header, one 'u v [c]' per edge)")
    parser.add_argument("--n", type=int, help="Vertex count of a generated G(n, p)")
    parser.add_argument("--p", type=float, help="Edge probability of a generated G(n, p)")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(description="Sequentially constrained Hamilton cycles in random graphs")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common_options()

    gen = sub.add_parser("gen", parents=[common], help="Generate a random graph file")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, required=True)
    gen.add_argument("--out", required=True, help="Output graph file")
    gen.add_argument("--colors", type=int, help="Colour edges uniformly from k colours")
    gen.add_argument("--rainbow-q", type=int, help="Colour edges uniformly from q colours (rainbow)")

    solve = sub.add_parser("solve", parents=[common], help="Find a Hamilton cycle")
    _add_instance_options(solve)
    solve.add_argument("--required-edge", help="Edge 'u,v' that the cycle must contain")
    solve.add_argument("--exact", action="store_true", help="Use the exhaustive solver")
    solve.add_argument("--retries", type=int, default=1, help="Attempts with derived seeds")

    pattern = sub.add_parser("pattern", parents=[common], help="Find a colour-patterned cycle")
    pattern.add_argument("--graph", required=True, help="Graph file, coloured for edge patterns")
    pattern.add_argument("--edge-pattern", help="Edge pattern file (one line of colours)")
    pattern.add_argument("--vertex-coloring", help="Vertex colouring file ('v c' lines)")
    pattern.add_argument("--vertex-pattern", help="Vertex pattern file (one line of colours)")
    pattern.add_argument("--rainbow", action="store_true", help="Require distinct edge colours")
    pattern.add_argument("--mode", choices=["exact", "heuristic"], default="exact")
    pattern.add_argument("--node-budget", type=int, help="Node budget of the heuristic mode")

    ordered = sub.add_parser("ordered", parents=[common], help="Cycle visiting S0 in order")
    _add_instance_options(ordered)
    group = ordered.add_mutually_exclusive_group(required=True)
    group.add_argument("--order", help="S0 order file (one line of vertex labels)")
    group.add_argument("--s0", help="S0 as comma-separated vertex labels")
    ordered.add_argument("--retries", type=int, default=1, help="Attempts with derived seeds")

    greedy = sub.add_parser("greedy", parents=[common], help="Greedy low-inversion cycle")
    greedy.add_argument("--n", type=int, required=True)
    greedy.add_argument("--p", type=float, required=True)
    greedy.add_argument("--histogram", help="Write the a_j histogram CSV here")
    greedy.add_argument("--cycle-out", help="Write the cycle line here")
    greedy.add_argument("--rainbow-q", type=int, help="Check the cycle for rainbow colours from q")
    greedy.add_argument("--retries", type=int, default=1, help="Attempts with derived seeds")

    count = sub.add_parser("count", parents=[common], help="Inversion-bounded counts and bounds")
    count.add_argument("--n", type=int, required=True)
    count.add_argument("--M", type=int, required=True)
    count.add_argument("--p", type=float, help="Edge probability for the first-moment bound")
    count.add_argument("--eps", type=float, default=0.5, help="ε for p_ε (default: %(default)s)")

    spread = sub.add_parser("spread", parents=[common], help="Spread of coloured Hamilton cycles")
    spread.add_argument("--n", type=int, required=True)
    spread.add_argument("--class-sizes", help="Comma-separated colour class sizes")
    spread.add_argument("--k", type=int, default=2, help="Balanced classes when sizes are omitted")
    spread.add_argument("--pattern", help="Vertex pattern file; default is a random arrangement")

    couple = sub.add_parser("couple", parents=[common], help="Coupling monotonicity experiment")
    couple.add_argument("--n", type=int, required=True)
    couple.add_argument("--p", type=float, required=True)
    couple.add_argument("--beta", type=float, default=2.0)
    couple.add_argument("--k", type=int, default=2)
    couple.add_argument("--trials", type=int, default=100)
    couple.add_argument("--grid", required=True, help="Edge indices t as lo:hi:step or a list")
    couple.add_argument("--out", help="CSV output path")

    sweep = sub.add_parser("sweep", parents=[common], help="Sweep a parameter grid to CSV")
    sweep.add_argument("--kind", required=True)
    sweep.add_argument("--n", type=int, required=True)
    sweep.add_argument("--grid", required=True, help="lo:hi:step or comma list")
    sweep.add_argument("--trials", type=int, default=100)
    sweep.add_argument("--p", type=float, help="Fixed p of greedy-inversion and coupling")
    sweep.add_argument("--k", type=int, default=2)
    sweep.add_argument("--beta", type=float, default=1.0)
    sweep.add_argument("--s0-size", type=int, default=3)
    sweep.add_argument("--M", type=int)
    sweep.add_argument(
        "--workers", type=int, default=int(os.getenv(ENV_WORKERS, "1")), help="Worker processes"
    )
    sweep.add_argument("--out", required=True, help="CSV output path")
    return parser


# Helpers --------------------------------------------------------------------


def _print_failure(message: str, *, code: str = "solver_failure", data: dict | None = None) -> int:
    payload = failure_report(message, code=code, data=data)["error"]
    print(f"error.code={payload['code']}")
    print(f"error.message={payload['message']}")
    for key, value in (payload.get("data") or {}).items():
        print(f"error.data.{key}={value}")
    return EXIT_FAILURE


def _load_instance(args: argparse.Namespace) -> Graph:
    if args.graph:
        return read_graph(args.graph)
    if args.n is None or args.p is None:
        raise ValidationError("Give either --graph or both --n and --p")
    return gen_gnp(args.n, args.p, args.seed)


def _parse_edge(text: str) -> tuple[int, int]:
    parts = text.replace(" ", "").split(",")
    if len(parts) != 2:
        raise ValidationError(f"Edge must look like 'u,v', got: {text}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ValidationError(f"Edge must look like 'u,v', got: {text}")


# Commands -------------------------------------------------------------------


def _cmd_gen(args: argparse.Namespace, params: dict[str, str]) -> int:
    g = gen_gnp(args.n, args.p, args.seed)
    coloring = None
    if args.colors:
        coloring = color_edges(g, [1.0 / args.colors] * args.colors, args.seed)
    elif args.rainbow_q:
        coloring = rainbow_color_edges(g, args.rainbow_q, args.seed)
    write_graph(g, args.out, coloring)
    print(f"n={g.n} m={g.m} seed={args.seed} rng={SCHEME}")
    return EXIT_OK


def _cmd_solve(args: argparse.Namespace, params: dict[str, str]) -> int:
    g = _load_instance(args)
    required = _parse_edge(args.required_edge) if args.required_edge else None
    if args.exact:
        h = brute_hamilton(
            g, (lambda c: c.contains_edge(*required)) if required else None
        )
        if h is None:
            return _print_failure("No Hamilton cycle exists", code="absent")
        print(format_cycle(h))
        return EXIT_OK

    rotation = RotationParams().with_overrides(params)

    @retry_over_seeds(attempts=args.retries)
    def attempt(*, seed: int):
        return posa_solve(g, required_edge=required, params=rotation, seed=seed)

    outcome = attempt(seed=args.seed)
    if not outcome.ok:
        report = outcome.report()["error"]
        return _print_failure(report["message"], code=report["code"], data=report.get("data"))
    print(format_cycle(outcome.cycle))
    return EXIT_OK


def _cmd_pattern(args: argparse.Namespace, params: dict[str, str]) -> int:
    g, edge_coloring = read_colored_graph(args.graph)
    prob = PatternProblem(
        g,
        edge_coloring=edge_coloring,
        vertex_coloring=read_vertex_coloring(args.vertex_coloring) if args.vertex_coloring else None,
        edge_pattern=read_pattern(args.edge_pattern) if args.edge_pattern else None,
        vertex_pattern=read_pattern(args.vertex_pattern) if args.vertex_pattern else None,
        rainbow_required=args.rainbow,
    )
    outcome = find_patterned(prob, args.mode, args.seed, node_budget=args.node_budget)
    if not outcome.ok:
        return _print_failure(
            f"No patterned cycle ({outcome.status.value})",
            code=outcome.status.value,
            data={"nodes": outcome.nodes},
        )
    print(format_cycle(outcome.cycle))
    return EXIT_OK


def _cmd_ordered(args: argparse.Namespace, params: dict[str, str]) -> int:
    g = _load_instance(args)
    if args.order:
        s0 = read_vertex_list(args.order)
    else:
        try:
            s0 = tuple(int(tok) for tok in args.s0.split(","))
        except ValueError:
            raise ValidationError(f"--s0 must be comma-separated labels, got: {args.s0}")
    ordered_params = OrderedParams().with_overrides(params)

    @retry_over_seeds(attempts=args.retries)
    def attempt(*, seed: int):
        return solve_ordered(g, s0, ordered_params, seed=seed)

    outcome = attempt(seed=args.seed)
    print(outcome.report.as_text())
    if not outcome.ok:
        return _print_failure(
            outcome.report.message or "Ordered pipeline failed", code=outcome.report.stage
        )
    print(format_cycle(outcome.cycle))
    return EXIT_OK


def _cmd_greedy(args: argparse.Namespace, params: dict[str, str]) -> int:
    n = validate_vertex_count(args.n, minimum=3)
    probs = greedy_split(args.p)
    greedy_params = GreedyParams().with_overrides(params)

    @retry_over_seeds(attempts=args.retries)
    def attempt(*, seed: int):
        lg: LayeredGraph = gen_layered(n, probs, seed)
        coloring = rainbow_color_edges(lg.union(), args.rainbow_q, seed) if args.rainbow_q else None
        return greedy_low_inversion(lg, greedy_params, seed=seed, coloring=coloring)

    outcome = attempt(seed=args.seed)
    print(outcome.transcript.as_text())
    if args.histogram:
        write_a_histogram(outcome.transcript, args.histogram)
    if not outcome.ok:
        return _print_failure(
            "Greedy completion failed",
            code="completion",
            data={"phase": outcome.transcript.completion, "unvisited": len(outcome.transcript.unvisited)},
        )
    if args.cycle_out:
        with open(args.cycle_out, "w", encoding="ascii") as f:
            f.write(format_cycle(outcome.cycle) + "\n")
    return EXIT_OK


def _cmd_count(args: argparse.Namespace, params: dict[str, str]) -> int:
    print(f"count={count_inversion_bounded(args.n, args.M)}")
    print(f"p_epsilon={p_epsilon(args.n, args.M, args.eps):.6g}")
    if args.p is not None:
        p = validate_probability(args.p)
        print(f"first_moment_bound={first_moment_bound(args.n, args.M, p):.6g}")
    if args.M >= args.n:
        print(f"restricted_class_size={restricted_class_size(args.n, args.M)}")
    return EXIT_OK


def _cmd_spread(args: argparse.Namespace, params: dict[str, str]) -> int:
    n = validate_vertex_count(args.n, minimum=3)
    if args.class_sizes:
        try:
            raw_sizes = [int(s) for s in args.class_sizes.split(",")]
        except ValueError:
            raise ValidationError(f"--class-sizes must be comma-separated integers, got: {args.class_sizes}")
        sizes = validate_class_sizes(n, raw_sizes)
    else:
        if args.k < 1:
            raise ValidationError(f"--k must be at least 1, got: {args.k}")
        sizes = tuple(n // args.k + (1 if i < n % args.k else 0) for i in range(args.k))
    vc = color_vertices_block(n, sizes)
    if args.pattern:
        pattern = read_pattern(args.pattern)
    else:
        arranged = derive_rng(args.seed, "pattern").permutation(list(vc.colors[1:]))
        pattern = ColorPattern(tuple(int(c) for c in arranged))
    report = spread_ratio(n, vc, pattern)
    for key in ("h_size", "formula_size", "automorphisms", "kappa_hat", "kappa_claim", "sets_checked"):
        print(f"{key}={getattr(report, key)}")
    print(f"formula_ok={report.formula_ok}")
    print(f"kappa_ok={report.kappa_ok}")
    print(f"bound_check={report.bound_check}")
    return EXIT_OK


def _write_or_print(result, out: str | None) -> None:
    if out:
        emit_csv(result, out)
    for row in result.rows:
        print(f"{row.point:g} {row.successes}/{row.trials} p_hat={row.p_hat:.6g}")


def _cmd_couple(args: argparse.Namespace, params: dict[str, str]) -> int:
    n = validate_vertex_count(args.n, minimum=3)
    pattern = random_pattern(n, args.k, args.seed)
    tracker = get_progress_tracker()
    op = f"couple:n={n}"
    tracker.start_operation(op, args.trials)
    result = coupling_monotonicity(
        n,
        args.p,
        min(1.0, args.beta * args.p),
        [1.0 / args.k] * args.k,
        pattern,
        [int(t) for t in parse_grid(args.grid)],
        args.trials,
        args.seed,
        progress=lambda done: tracker.update_progress(op, done),
    )
    _write_or_print(result, args.out)
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace, params: dict[str, str]) -> int:
    args.grid = parse_grid(args.grid)
    spec = SweepSpec.from_args(args, params)
    _write_or_print(run_sweep(spec), args.out)
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "pattern": _cmd_pattern,
    "ordered": _cmd_ordered,
    "greedy": _cmd_greedy,
    "count": _cmd_count,
    "spread": _cmd_spread,
    "couple": _cmd_couple,
    "sweep": _cmd_sweep,
}


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the command and return its exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        if args.command == "sweep":
            parser.error("sweep requires an explicit --seed")
        args.seed = 0

    configure_logging(
        level=args.log_level, log_format=args.log_format, handler_type=args.log_handler
    )
    get_progress_tracker().register_callback(log_progress)

    try:
        params: dict[str, Any] = parse_key_values(args.params)
        code = _COMMANDS[args.command](args, params)
    except InfeasiblePatternError as e:
        code = _print_failure(str(e), code="infeasible")
    except (ValidationError, OSError) as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        code = EXIT_USAGE

    if args.metrics:
        print(json.dumps(perf_metrics.report(), indent=2, sort_keys=True), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> None:
    """Entry point for the seqham command."""
    code = run(argv)
    if code:
        raise SystemExit(code)


if __name__ == "__main__":
    main()

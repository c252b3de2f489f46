"""Command-line entry point: ``mofda <subcommand>``.

Exit codes: 0 on success, 1 on usage errors, 2 on runtime failures.

Each subcommand also accepts ``--config FILE``, a flat ``key = value`` file
whose keys are the long option names (dashes or underscores); options given
on the command line win over the file.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .benchmarks import PROBLEM_NAMES, get_problem
from .exceptions import MofdaError, UnknownProblemError
from .io import archive_rows, format_csv, header_lines, read_matrix, read_objectives, write_csv
from .metrics import GD_EXPONENT, evaluate_front
from .runner import run_mo_fda
from .scalarization import generate_weights
from .solver import SolverConfig
from .stats import METRIC_DIRECTIONS, align, format_cell, format_metric_tables, friedman_ranks, metric_tables

log = logging.getLogger("mofda")

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2
OUR_NAME = "Mo-FDA"
SPREAD_CONVENTION = "deb-delta(m=2);nn-generalized(m=3)"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- config files ------------------------------------------------------------


def read_config_file(path) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, path) -> None:
    actions = {a.dest: a for a in parser._actions}
    defaults = {}
    for key, raw in read_config_file(path).items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise UsageError(f"{path}: unknown key {key!r}")
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            defaults[key] = [v.strip() for v in raw.split(",") if v.strip()]
        else:
            defaults[key] = action.type(raw) if action.type else raw
    parser.set_defaults(**defaults)


# --- shared option groups ----------------------------------------------------


def _add_solver_options(p):
    d = SolverConfig()
    g = p.add_argument_group("solver")
    g.add_argument("--budget", type=int, default=d.eval_budget, help="evaluations per subproblem")
    g.add_argument("--depth", type=int, default=d.depth_k, help="fractal depth k")
    g.add_argument("--inflation", type=float, default=d.inflation)
    g.add_argument("--probe-ratio", type=float, default=d.quality_probe_ratio)
    g.add_argument("--ils-step-ratio", type=float, default=d.ils_initial_step_ratio)
    g.add_argument("--ils-shrink", type=float, default=d.ils_step_shrink)
    g.add_argument("--ils-min-step", type=float, default=d.ils_min_step)


def _add_run_options(p):
    p.add_argument("--n", type=int, default=100, help="number of weight vectors (Pareto points)")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="local worker processes")
    p.add_argument("--endpoint", dest="endpoints", action="append", default=[],
                   help="remote worker host:port (repeatable)")
    p.add_argument("--timeout", type=float, default=None, help="per-task timeout in seconds")
    p.add_argument("--output-dir", default="mofda-out")
    p.add_argument("--truth-count", type=int, default=1000, help="true-front samples for metrics")
    p.add_argument("--filter-dominated", action="store_true",
                   help="compute metrics on nondominated points only (the archive keeps all)")
    p.add_argument("--emit-trace", action="store_true", help="write per-task convergence traces")
    _add_solver_options(p)


def _solver_config(args) -> SolverConfig:
    try:
        return SolverConfig(
            depth_k=args.depth,
            eval_budget=args.budget,
            ils_initial_step_ratio=args.ils_step_ratio,
            ils_step_shrink=args.ils_shrink,
            ils_min_step=args.ils_min_step,
            inflation=args.inflation,
            quality_probe_ratio=args.probe_ratio,
            record_trace=args.emit_trace,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _out(path_or_none, text):
    if path_or_none:
        Path(path_or_none).parent.mkdir(parents=True, exist_ok=True)
        Path(path_or_none).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- solve / suite -------------------------------------------------------------


def _metric_conventions(ref):
    return {
        "hv_ref": ",".join(repr(float(v)) for v in ref),
        "gd_exponent": GD_EXPONENT,
        "spread": SPREAD_CONVENTION,
    }


def solve_problem(problem_name: str, args, out_dir: Path) -> dict[str, float]:
    """Run one problem end to end and write its CSV files. Returns the metrics."""
    cfg = _solver_config(args)
    problem = get_problem(problem_name)
    run_config = {"problem": problem.name, "n": args.n, "solver": cfg.to_dict(),
                  "truth_count": args.truth_count, "filter_dominated": args.filter_dominated}
    archive = run_mo_fda(problem.name, args.n, cfg, workers=args.workers,
                         endpoints=args.endpoints, timeout=args.timeout)

    truth = problem.true_front(args.truth_count).points
    approx = archive.nondominated_objectives() if args.filter_dominated else archive.objectives
    report = evaluate_front(approx, truth)
    comments = header_lines(run_config, _metric_conventions(report.reference_point))

    header, rows = archive_rows(archive)
    write_csv(out_dir / "archive.csv", header, rows, comments)
    write_csv(out_dir / "metrics.csv", ["metric", "value"], report.as_rows(), comments)
    if args.emit_trace:
        trace_rows = [(r.task_id, i, v) for r in archive.results for i, v in (r.trace or ())]
        write_csv(out_dir / "trace.csv", ["task_id", "eval_index", "best_value"], trace_rows, comments)

    n_dom = sum(archive.dominated_flags)
    evals = sum(r.evals_used for r in archive.results)
    wall = sum(r.wall_time for r in archive.results)
    print(f"{problem.name}: {len(archive)} points ({n_dom} dominated), {evals} evaluations, "
          f"{wall:.2f}s solver time -> {out_dir}")
    for name, value in report.as_rows():
        print(f"  {name:<12}{value:.6g}")
    return dict(report.as_rows())


def cmd_solve(args) -> int:
    solve_problem(args.problem, args, Path(args.output_dir))
    return EXIT_OK


def _load_external(specs) -> dict[str, dict[str, dict[str, float]]]:
    out = {}
    for spec in specs:
        name, sep, path = spec.partition("=")
        if not sep or not name or not path:
            raise UsageError(f"--compare expects NAME=PATH, got {spec!r}")
        rows, cols, values = read_matrix(path)
        out[name] = {r.lower(): dict(zip(cols, vals)) for r, vals in zip(rows, values)}
    return out


def cmd_suite(args) -> int:
    names = [p.strip().lower() for p in args.problems.split(",") if p.strip()]
    bad = [p for p in names if p not in PROBLEM_NAMES]
    if bad:
        raise UsageError(f"unknown problem(s): {', '.join(bad)}; known: {', '.join(PROBLEM_NAMES)}")
    external = _load_external(args.compare)
    out_dir = Path(args.output_dir)
    results, failed = {}, []
    for name in names:
        try:
            results[name] = solve_problem(name, args, out_dir / name)
        except (MofdaError, OSError, ValueError) as exc:
            log.error("%s failed: %s", name, exc)
            print(f"{name}: FAILED ({exc})", file=sys.stderr)
            failed.append(name)

    metrics = list(METRIC_DIRECTIONS)
    suite_config = {"problems": names, "n": args.n, "solver": _solver_config(args).to_dict(),
                    "truth_count": args.truth_count, "filter_dominated": args.filter_dominated}
    comments = header_lines(suite_config, {"gd_exponent": GD_EXPONENT, "spread": SPREAD_CONVENTION,
                                           "hv_ref": "per-problem default"})
    write_csv(out_dir / "matrix.csv", ["problem", *metrics],
              [[p, *(results[p][m] for m in metrics)] for p in names if p in results], comments)

    if external and results:
        tables = metric_tables({OUR_NAME: results, **external})
        rows = format_metric_tables(tables)
        write_csv(out_dir / "friedman.csv", rows[0], rows[1:], comments)
        print(align(rows))
    if failed:
        print(f"suite finished with failures: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


# --- small subcommands -----------------------------------------------------------


def cmd_metrics(args) -> int:
    problem = get_problem(args.problem)
    approx = read_objectives(args.input, nondominated_only=args.filter_dominated)
    truth = problem.true_front(args.truth_count).points
    ref = None if args.ref is None else np.array([float(v) for v in args.ref.split(",")])
    report = evaluate_front(approx, truth, ref)
    config = {"problem": problem.name, "input": Path(args.input).name, "truth_count": args.truth_count,
              "filter_dominated": args.filter_dominated}
    comments = header_lines(config, _metric_conventions(report.reference_point))
    _out(args.output, format_csv(["metric", "value"], report.as_rows(), comments))
    return EXIT_OK


def cmd_friedman(args) -> int:
    algorithms, functions, values = read_matrix(args.input)
    table = friedman_ranks(values, args.direction, algorithms, functions)
    stat, pvalue = table.friedman_statistic() if len(algorithms) > 1 else (float("nan"), float("nan"))
    config = {"input": Path(args.input).name, "direction": args.direction}
    comments = header_lines(config, {"ties": "average", "global_rank_ties": "min",
                                     "friedman_chi2": repr(stat), "p_value": repr(pvalue)})
    rows = [[a, m, r, format_cell(m, r)] for a, m, r in zip(table.algorithms, table.mean_ranks, table.global_ranks)]
    _out(args.output, format_csv(["algorithm", "mean_rank", "global_rank", "cell"], rows, comments))
    text = align([["algorithm", "rank"]] + [[a, format_cell(m, r)] for a, m, r in
                                              zip(table.algorithms, table.mean_ranks, table.global_ranks)])
    print(text, file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


def cmd_weights(args) -> int:
    try:
        weights = generate_weights(args.m, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    comments = header_lines({"m": args.m, "n": args.n})
    rows = [[w.index, *w.components] for w in weights]
    _out(args.output, format_csv(["index", *(f"w_{i + 1}" for i in range(args.m))], rows, comments))
    return EXIT_OK


def cmd_pf_true(args) -> int:
    problem = get_problem(args.problem)
    front = problem.true_front(args.count)
    comments = header_lines({"problem": problem.name, "count": args.count})
    header = [f"f_{i + 1}" for i in range(problem.n_obj)]
    _out(args.output, format_csv(header, front.points.tolist(), comments))
    return EXIT_OK


def cmd_worker(args) -> int:
    from .worker import worker_serve

    try:
        worker_serve(args.address)
    except KeyboardInterrupt:
        pass
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mofda", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mofda {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    parser.subcommands = {}

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        parser.subcommands[name] = p
        p.add_argument("--config", help="flat key = value file with option defaults")
        p.set_defaults(func=func)
        return p

    p = add("solve", cmd_solve, "solve one problem and write archive + metrics CSV")
    p.add_argument("--problem", required=True)
    _add_run_options(p)

    p = add("suite", cmd_suite, "solve every benchmark problem")
    p.add_argument("--problems", default=",".join(PROBLEM_NAMES), help="comma-separated problem names")
    p.add_argument("--compare", action="append", default=[], metavar="NAME=PATH",
                   help="metric matrix CSV of another algorithm (repeatable)")
    _add_run_options(p)

    p = add("metrics", cmd_metrics, "quality metrics of a front CSV")
    p.add_argument("input", help="CSV with f_1..f_m columns (an archive.csv works)")
    p.add_argument("--problem", required=True)
    p.add_argument("--truth-count", type=int, default=1000)
    p.add_argument("--ref", help="hypervolume reference point, comma-separated")
    p.add_argument("--filter-dominated", action="store_true")
    p.add_argument("--output")

    p = add("friedman", cmd_friedman, "Friedman mean ranks of an algorithms x functions matrix")
    p.add_argument("input")
    p.add_argument("--direction", choices=["minimize", "maximize"], default="minimize")
    p.add_argument("--output")

    p = add("weights", cmd_weights, "write a weight-vector family")
    p.add_argument("--m", type=int, default=2, help="number of objectives")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--output")

    p = add("pf-true", cmd_pf_true, "write samples of a problem's true Pareto front")
    p.add_argument("--problem", required=True)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--output")

    p = add("worker", cmd_worker, "serve tasks over TCP")
    p.add_argument("--address", default="127.0.0.1:7070")
    return parser


def _parse(parser, argv):
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        _apply_config(parser.subcommands[args.command], args.config)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _parse(parser, argv)
    except SystemExit as exc:
        # argparse exits on --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"mofda: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"mofda: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mofda: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownProblemError as exc:
        print(f"mofda: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MofdaError, OSError, ValueError) as exc:
        task = getattr(exc, "task_id", None)
        where = f" (task {task})" if task is not None else ""
        print(f"mofda: failed{where}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

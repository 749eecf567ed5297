"""Command-line interface: ``riskpath {gen,run,coverage,sweep,table}``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import kernels
from .baseline import baseline_var
from .benchgen import GENERATORS, BenchSpec
from .bucketed import RiskConfig, VarResult, bucketed_var, report_allocation
from .errors import (
    DomainMismatch,
    EmptySamples,
    GraphMismatch,
    GraphValidationError,
    InvalidParams,
    NotAPath,
    PathBudgetExceeded,
    UnsupportedEdgeKind,
)
from .evaluation import SWEEP_HEADER, coverage, format_table, sweep, table1, try_verdicts
from .graph import count_paths, validate
from .records import (
    check_graph_hash,
    graph_sha256,
    load_graph,
    read_record,
    save_graph,
    write_csv,
    write_record,
)

EXIT_OK, EXIT_VALIDATION, EXIT_BUDGET, EXIT_IO = 0, 2, 3, 4

_VALIDATION_ERRORS = (GraphValidationError, InvalidParams, UnsupportedEdgeKind, NotAPath,
                      DomainMismatch, EmptySamples, GraphMismatch, ValueError)


def _add_config_flags(p: argparse.ArgumentParser, coverage_only: bool = False) -> None:
    if not coverage_only:
        p.add_argument("--alpha", type=float, default=0.1)
        p.add_argument("--buckets", type=int, default=100)
        p.add_argument("--samples", type=int, default=10_000)
        p.add_argument("--delta", type=float, default=0.05)
        p.add_argument("--path-cap", type=int, default=10**6)
        p.add_argument("--reuse-draws", action="store_true",
                       help="share one draw set per (edge, predecessor budget) across budgets")
    p.add_argument("--seed", type=int, default=None if coverage_only else 0)
    p.add_argument("--coverage-samples", type=int, default=None if coverage_only else 10_000)
    p.add_argument("--threads", type=int, default=None, help="cap kernel worker threads")


def _config(args) -> RiskConfig:
    return RiskConfig(alpha=args.alpha, buckets=args.buckets, samples=args.samples,
                      delta=args.delta, seed=args.seed, coverage_samples=args.coverage_samples,
                      reuse_draws=args.reuse_draws, path_cap=args.path_cap)


def _set_threads(n: int | None) -> None:
    if n is None or kernels.BACKEND != "numba":
        return
    import numba

    numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def _parse_value(text: str) -> Any:
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _parse_params(items: Sequence[str]) -> dict[str, Any]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InvalidParams(f"expected key=value, got {item!r}")
        out[key] = _parse_value(value)
    return out


def _parse_values(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidParams(f"--values must be comma-separated integers, got {text!r}") from None
    if not vals:
        raise InvalidParams("--values is empty")
    return vals


# --- commands --------------------------------------------------------------------

def cmd_gen(args) -> int:
    graph = BenchSpec(args.family, _parse_params(args.params)).build()
    if args.out:
        save_graph(graph, args.out)
    else:
        json.dump(graph.to_dict(), sys.stdout, indent=2)
        print()
    print(f"{args.family}: {len(graph.vertices)} vertices, {len(graph.edges)} edges, "
          f"{count_paths(graph)} paths", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def _summary(res: VarResult) -> str:
    lines = [f"algorithm: {res.algorithm}", f"estimate:  {res.estimate!r}", f"path:      {res.path}"]
    if res.allocation is not None:
        lines.append(f"budget:    {report_allocation(res)}")
    lines.append(f"time:      {res.seconds:.3f}s")
    return "\n".join(lines)


def cmd_run(args) -> int:
    graph = load_graph(args.graph)
    validate(graph)
    cfg = _config(args)
    if args.algorithm == "bucketed":
        res = bucketed_var(graph, cfg, check=False)
    else:
        res = baseline_var(graph, cfg, check=False)
    body = res.to_dict()
    if not (args.all_paths and res.algorithm == "baseline"):
        body.pop("path_estimates", None)
    body["graph_sha256"] = graph_sha256(graph)
    if args.out:
        write_record(args.out, "result", body, res.seconds)
    print(_summary(res))
    if args.all_paths and res.path_estimates is not None:
        for p, q in res.path_estimates:
            print(f"  {q!r}\t{p}")
    return EXIT_OK


def cmd_coverage(args) -> int:
    graph = load_graph(args.graph)
    validate(graph)
    _, body = read_record(args.result, "result")
    check_graph_hash(body, graph)
    res = VarResult.from_dict(body)
    cfg = res.config
    n = args.coverage_samples if args.coverage_samples is not None else cfg.coverage_samples
    seed = args.seed if args.seed is not None else cfg.seed
    rep = coverage(graph, res.path, res.estimate, n, seed, cfg.alpha)
    rep.verdicts = try_verdicts(res, graph, cfg)
    out = rep.to_dict()
    out["graph_sha256"] = body["graph_sha256"]
    out["algorithm"] = res.algorithm
    if args.out:
        write_record(args.out, "coverage", out)
    print(f"coverage:  {rep.percent()}  (target {100 * rep.target:.2f}, N={rep.n})")
    for k, v in rep.verdicts.items():
        if k.endswith("_ok") or k == "unsupported":
            print(f"{k}: {v}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    graph = None
    if args.graph:
        graph = load_graph(args.graph)
        validate(graph)
    rows = sweep(args.kind, _parse_values(args.values), _config(args), graph, args.algorithm)
    tuples = [r.as_tuple() for r in rows]
    if args.out:
        write_csv(args.out, SWEEP_HEADER, tuples)
    print(",".join(SWEEP_HEADER))
    for r in rows:
        print(f"{r.param},{r.estimate:.6f},{r.coverage:.4f},{r.ci_lo:.4f},{r.ci_hi:.4f},{r.seconds:.3f}")
    return EXIT_OK


def cmd_table(args) -> int:
    names = args.benchmarks.split(",") if args.benchmarks else None
    rows = table1(_config(args), names)
    text = format_table(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="riskpath", description="Minimum value-at-risk paths in agent graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated benchmark graph")
    g.add_argument("family", choices=sorted(GENERATORS))
    g.add_argument("params", nargs="*", metavar="key=value")
    g.add_argument("--out", help="graph file (default: stdout)")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="estimate the minimum-VaR path")
    r.add_argument("--graph", required=True)
    r.add_argument("--out", help="result file")
    r.add_argument("--algorithm", choices=("bucketed", "baseline"), default="bucketed")
    r.add_argument("--all-paths", action="store_true", help="baseline: keep the per-path table")
    _add_config_flags(r)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("coverage", help="fresh-sample coverage of a result")
    c.add_argument("--graph", required=True)
    c.add_argument("--result", required=True)
    c.add_argument("--out", help="report file")
    _add_config_flags(c, coverage_only=True)
    c.set_defaults(func=cmd_coverage)

    s = sub.add_parser("sweep", help="coverage against samples, buckets or agents")
    s.add_argument("kind", choices=("samples", "buckets", "agents"))
    s.add_argument("--values", required=True, help="comma-separated integers")
    s.add_argument("--graph", help="base graph (default: 8-edge uniform chain)")
    s.add_argument("--out", help="CSV file")
    s.add_argument("--algorithm", choices=("bucketed", "baseline"), default="bucketed")
    _add_config_flags(s)
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("table", help="both algorithms on the benchmark analogs")
    t.add_argument("--benchmarks", help="comma-separated subset")
    t.add_argument("--out")
    _add_config_flags(t)
    t.set_defaults(func=cmd_table)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _set_threads(getattr(args, "threads", None))
        return args.func(args)
    except PathBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except _VALIDATION_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

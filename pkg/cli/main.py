# cli/main.py
import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any

from config import settings
from core.errors import PolcaError
from core.memory import load_snapshot, memory_snapshot
from filtering.semantic import audit_snapshot
from strategies.models import PriorityKind
from theory.harness import run_theory_suite, write_theory_csv
from .config import effective_config, load_config
from .errors import ConfigError
from .metrics import counters_from_trace, metrics_curves, write_metrics_csv
from .runner import build_run_inputs, execute_run, planned_run_id
from .trace_io import JsonlTraceWriter, TraceHeader, read_trace

logger = logging.getLogger(__name__)


def configure_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _set(target: dict[str, Any], dotted: str, value: Any) -> None:
    if value is None:
        return
    *parents, leaf = dotted.split(".")
    for part in parents:
        target = target.setdefault(part, {})
    target[leaf] = value


def run_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    _set(overrides, "search.seed", args.seed)
    _set(overrides, "search.budget_metric_calls", args.budget_metric_calls)
    _set(overrides, "search.epsilon", args.epsilon)
    _set(overrides, "search.priority.kind", args.priority)
    _set(overrides, "search.priority.sigma", args.sigma)
    _set(overrides, "search.priority.beta", args.beta)
    _set(overrides, "search.num_candidates", args.num_candidates)
    _set(overrides, "search.batch_size", args.batch_size)
    _set(overrides, "search.num_batches", args.num_batches)
    _set(overrides, "search.max_parallel", args.max_parallel)
    _set(overrides, "oracle", args.oracle)
    _set(overrides, "output_dir", args.output_dir)
    return overrides


def theory_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    _set(overrides, "search.seed", args.seed)
    _set(overrides, "theory.delta0", args.delta0)
    _set(overrides, "theory.gamma", args.gamma)
    _set(overrides, "theory.cap", args.cap)
    _set(overrides, "theory.sigma", args.sigma)
    _set(overrides, "theory.replicates", args.replicates)
    _set(overrides, "theory.horizons", args.horizons)
    _set(overrides, "theory.seeds", args.seeds)
    _set(overrides, "theory.workers", args.workers)
    if args.hitting_point:
        points = []
        for spec in args.hitting_point:
            try:
                delta0, levels = spec.split(":")
                points.append({"delta0": float(delta0), "levels": int(levels)})
            except ValueError as exc:
                raise ConfigError(f"--hitting-point expects DELTA0:LEVELS, got {spec!r}") from exc
        _set(overrides, "theory.hitting_grid", points)
    _set(overrides, "output_dir", args.output_dir)
    return overrides


def cmd_run(args: argparse.Namespace) -> int:
    run_settings = load_config(args.config, run_overrides(args))
    output_dir = run_settings.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)

    inputs = build_run_inputs(run_settings)
    run_id = planned_run_id(run_settings, inputs[0], inputs[1])
    header = TraceHeader(run_id=run_id, config=effective_config(run_settings))
    with JsonlTraceWriter(output_dir / "trace.jsonl", header) as writer:
        result = asyncio.run(execute_run(run_settings, listener=writer.write, inputs=inputs))

    write_metrics_csv(metrics_curves(result.trace), output_dir / "metrics.csv")
    (output_dir / "memory.json").write_text(memory_snapshot(result.memory, result.run_id), encoding="utf-8")
    summary = {
        "run_id": result.run_id,
        "best_candidate_id": result.best.id,
        "best_payload": result.best.payload,
        "best_score": result.best_score,
        "counters": result.counters.model_dump(),
    }
    (output_dir / "summary.json").write_text(json.dumps(summary, indent=2), encoding="utf-8")
    print(json.dumps(summary))
    return 0


def cmd_theory(args: argparse.Namespace) -> int:
    run_settings = load_config(args.config, theory_overrides(args))
    output_dir = run_settings.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)

    result = run_theory_suite(run_settings.theory, run_settings.search.seed)
    write_theory_csv(result, output_dir / "theory.csv")
    for row in result.rows:
        status = "PASS" if row.passed else "FAIL"
        print(f"{status} {row.experiment} {row.rule} delta0={row.delta0} mean={row.empirical_mean:.4f} analytic={row.analytic}")
    print("theory suite passed" if result.passed else "theory suite FAILED")
    return 0 if result.passed else 1


def cmd_filter_check(args: argparse.Namespace) -> int:
    try:
        text = Path(args.snapshot).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read snapshot {args.snapshot}: {exc}") from exc
    _, memory = load_snapshot(text)
    epsilon = args.epsilon if args.epsilon is not None else load_config(args.config).search.epsilon
    audit = audit_snapshot(memory, epsilon, args.side_length)
    print(audit.model_dump_json(indent=2))
    return 0 if audit.ok else 1


def cmd_replay(args: argparse.Namespace) -> int:
    trace_path = Path(args.trace)
    header, events = read_trace(trace_path)
    output_dir = Path(args.output_dir) if args.output_dir else trace_path.parent
    output_dir.mkdir(parents=True, exist_ok=True)
    write_metrics_csv(metrics_curves(events), output_dir / "metrics.csv")

    rebuilt = counters_from_trace(events)
    recorded = events[-1].payload.get("counters", {})
    print(json.dumps({"run_id": header.run_id, "counters": rebuilt.model_dump(), "recorded": recorded}))
    if rebuilt.model_dump() != recorded:
        logger.error("counters rebuilt from the trace disagree with the recorded ones")
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polca", description="Priority-queue generative optimization")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the search loop")
    run.add_argument("--config", type=Path)
    run.add_argument("--seed", type=int)
    run.add_argument("--budget-metric-calls", type=int)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--priority", choices=[k.value for k in PriorityKind])
    run.add_argument("--sigma", type=float)
    run.add_argument("--beta", type=float)
    run.add_argument("--num-candidates", type=int)
    run.add_argument("--batch-size", type=int)
    run.add_argument("--num-batches", type=int)
    run.add_argument("--max-parallel", type=int)
    run.add_argument("--oracle", choices=["synthetic", "llm"])
    run.add_argument("--output-dir", type=Path)
    run.set_defaults(handler=cmd_run)

    theory = sub.add_parser("theory", help="Monte Carlo checks of the convergence results")
    theory.add_argument("--config", type=Path)
    theory.add_argument("--seed", type=int)
    theory.add_argument("--delta0", type=float)
    theory.add_argument("--gamma", type=float)
    theory.add_argument("--cap", type=float)
    theory.add_argument("--sigma", type=float)
    theory.add_argument("--replicates", type=int)
    theory.add_argument("--horizons", type=int, nargs="+")
    theory.add_argument("--seeds", type=int)
    theory.add_argument("--workers", type=int)
    theory.add_argument("--hitting-point", action="append", metavar="DELTA0:LEVELS")
    theory.add_argument("--output-dir", type=Path)
    theory.set_defaults(handler=cmd_theory)

    check = sub.add_parser("filter-check", help="audit epsilon separation of a memory snapshot")
    check.add_argument("snapshot", type=Path)
    check.add_argument("--config", type=Path)
    check.add_argument("--epsilon", type=float)
    check.add_argument("--side-length", type=float, default=1.0)
    check.set_defaults(handler=cmd_filter_check)

    replay = sub.add_parser("replay", help="rebuild metrics.csv and counters from a trace")
    replay.add_argument("trace", type=Path)
    replay.add_argument("--output-dir", type=Path)
    replay.set_defaults(handler=cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except PolcaError as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

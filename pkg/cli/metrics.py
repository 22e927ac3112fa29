# cli/metrics.py
import csv
from collections.abc import Sequence
from enum import StrEnum
from pathlib import Path

from pydantic import BaseModel

from engine.models import MetricCounters
from engine.trace import TraceEvent, TraceKind
from .errors import TraceFormatError

METRICS_CSV_COLUMNS = ["step_kind", "step_index", "best_score"]


class StepKind(StrEnum):
    EVALUATION_STEP = "evaluation_step"
    METRIC_CALL = "metric_call"
    PROPOSAL_STEP = "proposal_step"
    PROPOSAL = "proposal"


class MetricsRow(BaseModel):
    step_kind: StepKind
    step_index: int
    best_score: float


def _require_complete(events: Sequence[TraceEvent]) -> None:
    if not events or events[-1].kind is not TraceKind.RUN_END:
        raise TraceFormatError("trace is truncated: it does not end with run_end")


def metrics_curves(events: Sequence[TraceEvent]) -> list[MetricsRow]:
    """Best score so far against each of the four budget axes.

    Steps seen since the last memory update are stamped with the best score
    that update reports.
    """
    _require_complete(events)

    totals = {kind: 0 for kind in StepKind}
    pending = {kind: 0 for kind in StepKind}
    seen_eval_steps: set[int] = set()
    seen_proposal_steps: set[int] = set()
    best: float | None = None
    rows: list[MetricsRow] = []

    def flush() -> None:
        for kind in StepKind:
            if pending[kind] and best is not None:
                for _ in range(pending[kind]):
                    totals[kind] += 1
                    rows.append(MetricsRow(step_kind=kind, step_index=totals[kind], best_score=best))
                pending[kind] = 0

    for event in events:
        payload = event.payload
        if event.kind is TraceKind.EVALUATION:
            pending[StepKind.METRIC_CALL] += 1
            if payload["evaluation_step"] not in seen_eval_steps:
                seen_eval_steps.add(payload["evaluation_step"])
                pending[StepKind.EVALUATION_STEP] += 1
        elif event.kind is TraceKind.PROPOSAL:
            if payload["proposal_step"] not in seen_proposal_steps:
                seen_proposal_steps.add(payload["proposal_step"])
                pending[StepKind.PROPOSAL_STEP] += 1
            if payload.get("candidate") is not None:
                pending[StepKind.PROPOSAL] += 1
        elif event.kind is TraceKind.MEMORY_UPDATE and payload.get("action") == "stats":
            if payload.get("best_score") is not None:
                best = payload["best_score"] if best is None else max(best, payload["best_score"])
            flush()
        elif event.kind in (TraceKind.ITERATION_START, TraceKind.RUN_END):
            flush()

    return sorted(rows, key=lambda r: (list(StepKind).index(r.step_kind), r.step_index))


def counters_from_trace(events: Sequence[TraceEvent]) -> MetricCounters:
    evaluations = [e for e in events if e.kind is TraceKind.EVALUATION]
    proposals = [e for e in events if e.kind is TraceKind.PROPOSAL]
    return MetricCounters(
        metric_calls=len(evaluations),
        evaluation_steps=len({e.payload["evaluation_step"] for e in evaluations}),
        proposals=sum(1 for e in proposals if e.payload.get("candidate") is not None),
        proposal_steps=len({e.payload["proposal_step"] for e in proposals}),
    )


def write_metrics_csv(rows: Sequence[MetricsRow], path: Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=METRICS_CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row.model_dump(mode="json"))

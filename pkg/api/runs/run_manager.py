# api/runs/run_manager.py
import uuid

from cli.metrics import MetricsRow, metrics_curves
from core.errors import PolcaError
from engine.errors import BudgetError, DatasetError, EvaluationError
from engine.loop import SearchEngine
from oracles.errors import OracleConfigError
from oracles.synthetic import build_synthetic_oracles, synthetic_dataset, synthetic_seed_candidate
from registry import RunRegistry, StoredRun
from .models import RunCreate, RunRead


class RunNotFoundError(PolcaError):
    pass


class RunRejectedError(PolcaError):
    pass


def to_read(stored: StoredRun) -> RunRead:
    result = stored.result
    return RunRead(
        id=result.run_id,
        created_at=stored.created_at,
        best_candidate_id=result.best.id,
        best_payload=result.best.payload,
        best_score=result.best_score,
        memory_size=len(result.memory),
        counters=result.counters,
    )


async def create_run(registry: RunRegistry, payload: RunCreate) -> StoredRun:
    """Execute a synthetic run and keep its result."""
    env = payload.env
    engine = SearchEngine(payload.search, build_synthetic_oracles(env))
    try:
        result = await engine.run(
            synthetic_dataset(payload.dataset_size),
            synthetic_seed_candidate(env, payload.initial_true_mean),
            run_id=f"run-{uuid.uuid4().hex[:12]}",
        )
    except (BudgetError, DatasetError, EvaluationError, OracleConfigError) as exc:
        raise RunRejectedError(str(exc)) from exc
    return registry.add(result)


def get_run(registry: RunRegistry, run_id: str) -> StoredRun:
    stored = registry.get(run_id)
    if stored is None:
        raise RunNotFoundError(f"run {run_id} not found")
    return stored


def run_metrics(registry: RunRegistry, run_id: str) -> list[MetricsRow]:
    return metrics_curves(get_run(registry, run_id).result.trace)

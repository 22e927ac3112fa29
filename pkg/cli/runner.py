# cli/runner.py
import json
from collections.abc import Callable
from pathlib import Path

from pydantic import ValidationError

from core.models import Candidate, Task
from engine.errors import DatasetError
from engine.loop import SearchEngine, derive_run_id
from engine.models import RunResult
from engine.trace import TraceEvent
from llm.oracles import build_llm_oracles
from oracles.base import OracleSet
from oracles.synthetic import build_synthetic_oracles, synthetic_dataset, synthetic_seed_candidate
from .config import RunSettings


def load_dataset(path: Path) -> list[Task]:
    """Tasks from a JSONL file with ``id``, ``input`` and optional ``side_info`` per line."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path}: {exc}") from exc

    tasks = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            tasks.append(Task.model_validate(json.loads(line)))
        except (ValueError, ValidationError) as exc:
            raise DatasetError(f"{path}:{number} is not a task record: {exc}") from exc
    if not tasks:
        raise DatasetError(f"dataset {path} has no tasks")
    return tasks


def build_run_inputs(run_settings: RunSettings) -> tuple[list[Task], Candidate, OracleSet]:
    if run_settings.oracle == "synthetic":
        env = run_settings.env
        return (
            synthetic_dataset(run_settings.dataset_size),
            synthetic_seed_candidate(env, run_settings.initial_true_mean),
            build_synthetic_oracles(env),
        )

    if run_settings.dataset is None:
        raise DatasetError("the llm oracle needs a dataset file (set `dataset` in the config)")
    oracles = build_llm_oracles(
        run_settings.endpoint,
        run_settings.embedding,
        use_summarizer_model=run_settings.search.use_summarizer,
    )
    return load_dataset(run_settings.dataset), Candidate(id="theta0", payload=run_settings.seed_payload), oracles


def planned_run_id(run_settings: RunSettings, dataset: list[Task], candidate0: Candidate) -> str:
    return derive_run_id(run_settings.search, dataset, candidate0)


async def execute_run(
    run_settings: RunSettings,
    *,
    listener: Callable[[TraceEvent], None] | None = None,
    inputs: tuple[list[Task], Candidate, OracleSet] | None = None,
) -> RunResult:
    dataset, candidate0, oracles = inputs or build_run_inputs(run_settings)
    engine = SearchEngine(run_settings.search, oracles, listener=listener)
    return await engine.run(dataset, candidate0, run_id=planned_run_id(run_settings, dataset, candidate0))

# engine/evaluation.py
import asyncio
import logging
from collections.abc import Sequence

from core.models import Candidate, Observation, Task
from core.rng import derive_rng
from oracles.base import Guide
from .errors import EvaluationError
from .models import MetricCounters

logger = logging.getLogger(__name__)


async def evaluate(
    candidates: Sequence[Candidate],
    batch: Sequence[Task],
    guide: Guide,
    counters: MetricCounters,
    *,
    iteration: int,
    phase: str = "explore",
    seed: int = 0,
    max_parallel: int = 1,
    failure_reward: float = 0.0,
) -> list[Observation]:
    """Run every candidate on every task of ``batch``.

    Each (candidate, slot) pair gets its own random stream, so the result
    does not depend on completion order. Observations come back sorted by
    candidate id, task id, then batch slot.
    """
    if not candidates or not batch:
        raise EvaluationError("evaluate needs at least one candidate and one task")

    limit = max_parallel if getattr(guide, "concurrent_safe", True) else 1
    semaphore = asyncio.Semaphore(limit)

    async def _run_pair(candidate: Candidate, slot: int, task: Task) -> Observation:
        rng = derive_rng(seed, "evaluate", phase, iteration, candidate.id, slot)
        async with semaphore:
            try:
                result = await guide.evaluate(candidate, task, rng)
                return Observation(
                    candidate_id=candidate.id,
                    task_id=task.id,
                    output=result.output,
                    reward=result.reward,
                    feedback=result.feedback,
                    iteration=iteration,
                )
            except Exception as exc:
                logger.debug("guide failed on %s/%s: %s", candidate.id, task.id, exc)
                return Observation(
                    candidate_id=candidate.id,
                    task_id=task.id,
                    reward=failure_reward,
                    feedback=f"evaluation failed: {exc}",
                    iteration=iteration,
                    failed=True,
                )

    pairs = [(candidate, slot, task) for candidate in candidates for slot, task in enumerate(batch)]
    observations = await asyncio.gather(*(_run_pair(*pair) for pair in pairs))

    counters.metric_calls += len(pairs)
    counters.evaluation_steps += 1

    if all(obs.failed for obs in observations):
        raise EvaluationError(f"all {len(pairs)} evaluations failed in iteration {iteration} ({phase})")

    order = sorted(range(len(pairs)), key=lambda i: (pairs[i][0].id, pairs[i][2].id, pairs[i][1]))
    return [observations[i] for i in order]

# engine/proposal.py
import asyncio
import logging
from collections.abc import Callable, Mapping, Sequence

from core.models import Candidate, Observation, Task
from core.rng import derive_rng
from oracles.base import Embedder, Optimizer, ProposalContext, Rollout
from .errors import ProposalError
from .models import MetricCounters

logger = logging.getLogger(__name__)


def build_context(
    candidate: Candidate,
    observations: Sequence[Observation],
    tasks: Mapping[str, Task],
    history: str,
) -> ProposalContext:
    rollouts = [
        Rollout(
            task_id=obs.task_id,
            input=tasks[obs.task_id].input if obs.task_id in tasks else "",
            output=obs.output,
            reward=obs.reward,
            feedback=obs.feedback,
        )
        for obs in observations
    ]
    return ProposalContext(candidate=candidate, rollouts=rollouts, history=history)


async def propose_programs(
    optimizer: Optimizer,
    explored: Sequence[tuple[Candidate, Sequence[Observation]]],
    history_context: str,
    counters: MetricCounters,
    *,
    embedder: Embedder,
    tasks: Mapping[str, Task],
    next_id: Callable[[], str],
    iteration: int,
    seed: int = 0,
    max_parallel: int = 1,
    proposals_per_context: int = 1,
    failures: list[tuple[str, str]] | None = None,
) -> list[Candidate]:
    """Ask the optimizer for new programs, one context per explored program.

    A failed context is logged (and appended to ``failures`` as
    ``(parent_id, error)``) and contributes nothing. Fresh ids are handed
    out in context order once all work is done.
    """
    if not explored:
        raise ProposalError("no explored candidates to propose from")
    for candidate, observations in explored:
        if not observations:
            raise ProposalError(f"explored candidate {candidate.id!r} has no observations this iteration")

    contexts = [build_context(c, obs, tasks, history_context) for c, obs in explored]
    safe = getattr(optimizer, "concurrent_safe", True) and getattr(embedder, "concurrent_safe", True)
    semaphore = asyncio.Semaphore(max_parallel if safe else 1)

    async def _propose(context: ProposalContext, draw: int) -> tuple[str, tuple[float, ...]] | str:
        rng = derive_rng(seed, "propose", iteration, context.candidate.id, draw)
        async with semaphore:
            try:
                payload = await optimizer.propose(context, rng)
                embedding = await embedder.embed(payload)
                return payload, tuple(embedding)
            except Exception as exc:
                logger.debug("proposal from %s failed: %s", context.candidate.id, exc)
                return str(exc) or type(exc).__name__

    jobs = [(context, draw) for context in contexts for draw in range(proposals_per_context)]
    results = await asyncio.gather(*(_propose(*job) for job in jobs))
    counters.proposal_steps += 1

    proposals: list[Candidate] = []
    for (context, _), result in zip(jobs, results):
        if isinstance(result, str):
            if failures is not None:
                failures.append((context.candidate.id, result))
            continue
        payload, embedding = result
        proposals.append(
            Candidate(
                id=next_id(),
                payload=payload,
                embedding=embedding,
                parent_id=context.candidate.id,
                created_at=iteration,
            )
        )

    counters.proposals += len(proposals)
    return proposals

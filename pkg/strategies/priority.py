# strategies/priority.py
import math

import numpy as np

from core.errors import EmptyMemoryError
from core.models import Candidate, Memory, MemoryEntry
from .models import PriorityConfig, PriorityKind


def exploration_bonus(count, n: float, scale: float):
    """``scale * sqrt(ln(n) / count)``, elementwise over numpy arrays.

    Zero counts and ``n < 1`` give an infinite bonus; a zero scale always
    gives zero. Returns a float for scalar input.
    """
    counts = np.asarray(count, dtype=float)
    if scale == 0:
        bonus = np.zeros_like(counts)
    elif n < 1:
        bonus = np.full_like(counts, np.inf)
    else:
        log_n = math.log(n)
        safe = np.where(counts > 0, counts, 1.0)
        bonus = np.where(counts > 0, scale * np.sqrt(log_n / safe), np.inf)
    return float(bonus) if bonus.ndim == 0 else bonus


def _generation_mean(entry: MemoryEntry, generation: int) -> float:
    rewards = [o.reward for o in entry.observations if o.iteration == generation]
    if not rewards:
        return math.inf
    return math.fsum(rewards) / len(rewards)


def priority(entry: MemoryEntry, memory: Memory, config: PriorityConfig, iteration: int | None = None) -> float:
    """Exploration priority of ``entry``; larger is explored first.

    ``iteration`` only matters for beam search and defaults to the newest
    generation present in memory. An iteration that admits nothing leaves
    the previous generation as the newest one, so beam keeps exploring it.
    """
    kind = config.kind

    if kind is PriorityKind.LIFO:
        return float(entry.candidate.created_at)

    if kind is PriorityKind.BEAM:
        generation = memory.latest_generation if iteration is None else iteration
        if entry.candidate.created_at != generation:
            return -math.inf
        return _generation_mean(entry, generation)

    if not entry.sampled:
        return math.inf

    if kind is PriorityKind.MEAN:
        return entry.mean
    if kind is PriorityKind.UCB_THEORY:
        n = config.horizon if config.horizon is not None else memory.total_samples
        return entry.mean + exploration_bonus(entry.sample_count, n, 2 * config.sigma)
    if kind is PriorityKind.UCB_BETA:
        return entry.mean + exploration_bonus(entry.sample_count, memory.total_samples, config.beta)

    raise ValueError(f"unsupported priority kind {kind!r}")


def select_programs(memory: Memory, config: PriorityConfig) -> list[Candidate]:
    """Top entries by priority, at most ``config.width`` of them.

    Ties go to fewer samples, then earlier ``created_at``, then insertion order.
    Entries with priority -inf (pruned beam generations) are never selected.
    """
    if not memory.entries:
        raise EmptyMemoryError("cannot select from an empty memory")

    generation = memory.latest_generation
    scored = [(priority(e, memory, config, generation), e) for e in memory.entries.values()]
    ranked = sorted(
        ((p, e) for p, e in scored if p != -math.inf),
        key=lambda pe: (
            -pe[0],
            pe[1].sample_count,
            pe[1].candidate.created_at,
            pe[1].inserted_seq,
        ),
    )
    return [e.candidate for _, e in ranked[: config.width]]

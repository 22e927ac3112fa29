# filtering/semantic.py
"""Epsilon-net admission of proposed candidates.

Candidates are visited farthest-first: at each step the raw proposal
furthest from everything already admitted (memory plus earlier accepts)
is considered, and the pass stops at the first one closer than epsilon.
"""
import logging
import math
from collections.abc import Sequence

import numpy as np

from core.models import Candidate, Memory
from .errors import DimensionMismatchError, FilterConfigError, MissingEmbeddingError
from .models import FilterAudit, FilterConfig, FilterDecision, SeparationViolation

logger = logging.getLogger(__name__)


def semantic_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance between two embeddings."""
    va = np.asarray(a, dtype=float)
    vb = np.asarray(b, dtype=float)
    if va.shape != vb.shape:
        raise DimensionMismatchError(f"cannot compare embeddings of shape {va.shape} and {vb.shape}")
    return float(np.linalg.norm(va - vb))


def _pairwise(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return np.linalg.norm(left[:, None, :] - right[None, :, :], axis=-1)


def _embedding_matrix(candidates: Sequence[Candidate], dimension: int, what: str) -> np.ndarray:
    rows = []
    for cand in candidates:
        if cand.embedding is None:
            raise MissingEmbeddingError(f"{what} candidate {cand.id!r} has no embedding")
        if len(cand.embedding) != dimension:
            raise DimensionMismatchError(
                f"{what} candidate {cand.id!r} has dimension {len(cand.embedding)}, expected {dimension}"
            )
        rows.append(cand.embedding)
    return np.asarray(rows, dtype=float).reshape(len(rows), dimension)


def semantic_filter(
    raw: Sequence[Candidate],
    memory: Memory,
    config: FilterConfig,
) -> tuple[list[Candidate], list[FilterDecision]]:
    """Admit the farthest-first prefix of ``raw`` that stays epsilon-separated.

    Returns the accepted candidates in admission order and one decision per
    raw candidate. The first rejected candidate ends the pass; every
    candidate still waiting at that point is rejected with its current
    minimum distance.
    """
    if not raw:
        return [], []

    proposals = _embedding_matrix(raw, config.dimension, "proposed")
    members = _embedding_matrix([e.candidate for e in memory.entries.values()], config.dimension, "memory")

    min_dist = np.full(len(raw), np.inf)
    if len(members):
        min_dist = _pairwise(proposals, members).min(axis=1)

    waiting = np.ones(len(raw), dtype=bool)
    accepted: list[Candidate] = []
    decisions: list[FilterDecision] = []

    while waiting.any():
        # argmax returns the first maximum, so ties fall back to raw order
        idx = int(np.argmax(np.where(waiting, min_dist, -np.inf)))
        distance = float(min_dist[idx])
        if distance < config.epsilon:
            break
        waiting[idx] = False
        accepted.append(raw[idx])
        decisions.append(
            FilterDecision(
                candidate_id=raw[idx].id,
                accepted=True,
                min_distance=None if math.isinf(distance) else distance,
                epsilon=config.epsilon,
            )
        )
        min_dist = np.minimum(min_dist, np.linalg.norm(proposals - proposals[idx], axis=1))

    if waiting.any():
        order = sorted(np.flatnonzero(waiting), key=lambda i: (-min_dist[i], i))
        for idx in order:
            decisions.append(
                FilterDecision(
                    candidate_id=raw[idx].id,
                    accepted=False,
                    min_distance=float(min_dist[idx]),
                    epsilon=config.epsilon,
                )
            )

    logger.debug("filter admitted %d of %d proposals (epsilon=%s)", len(accepted), len(raw), config.epsilon)
    return accepted, decisions


def packing_bound(epsilon: float, dimension: int, side_length: float = 1.0) -> int:
    """Upper bound on how many epsilon-separated points fit in a cube of the given side."""
    if epsilon <= 0:
        raise FilterConfigError("packing bound needs epsilon > 0")
    if dimension <= 0:
        raise FilterConfigError("packing bound needs a positive dimension")
    if side_length <= 0:
        raise FilterConfigError("packing bound needs a positive side length")
    per_axis = math.ceil(side_length * math.sqrt(dimension) / epsilon + 1)
    return per_axis**dimension


def audit_snapshot(memory: Memory, epsilon: float, side_length: float = 1.0) -> FilterAudit:
    """Check pairwise separation of every embedded member of ``memory``."""
    members = [e.candidate for e in memory.entries.values() if e.candidate.embedding is not None]
    bound = None
    if members and epsilon > 0:
        bound = packing_bound(epsilon, len(members[0].embedding), side_length)

    if len(members) < 2:
        return FilterAudit(epsilon=epsilon, member_count=len(members), packing_bound=bound)

    matrix = _embedding_matrix(members, len(members[0].embedding), "memory")
    distances = _pairwise(matrix, matrix)
    upper = np.triu_indices(len(members), k=1)
    pair_distances = distances[upper]

    violations = [
        SeparationViolation(first_id=members[i].id, second_id=members[j].id, distance=float(d))
        for i, j, d in zip(*upper, pair_distances)
        if d < epsilon
    ]
    return FilterAudit(
        epsilon=epsilon,
        member_count=len(members),
        min_pairwise_distance=float(pair_distances.min()),
        packing_bound=bound,
        violations=violations,
    )

# core/memory.py
import logging
from collections.abc import Sequence

from .errors import DuplicateCandidateError, EmptyMemoryError, UnknownCandidateError
from .models import Candidate, Memory, MemoryEntry, MemorySnapshot, Observation

logger = logging.getLogger(__name__)


def memory_insert(memory: Memory, candidate: Candidate) -> MemoryEntry:
    """Add an unsampled entry for ``candidate``."""
    if candidate.id in memory.entries:
        raise DuplicateCandidateError(f"candidate {candidate.id!r} is already in memory")

    entry = MemoryEntry(candidate=candidate, inserted_seq=memory.next_seq)
    memory.entries[candidate.id] = entry
    memory.next_seq += 1
    logger.debug("inserted candidate %s (seq %d)", candidate.id, entry.inserted_seq)
    return entry


def update_stats(memory: Memory, observations: Sequence[Observation]) -> None:
    """Append observations and refresh running means.

    Every observation is checked before any is applied, so an unknown id
    leaves the memory untouched.
    """
    for obs in observations:
        if obs.candidate_id not in memory.entries:
            raise UnknownCandidateError(f"observation references unknown candidate {obs.candidate_id!r}")

    for obs in observations:
        entry = memory.entries[obs.candidate_id]
        entry.observations.append(obs)
        entry.sample_count += 1
        entry.mean += (obs.reward - entry.mean) / entry.sample_count

    memory.total_samples += len(observations)


def best_candidate(memory: Memory) -> MemoryEntry:
    """Entry with the highest empirical mean among sampled entries.

    Ties prefer more samples, then the earlier ``created_at``, then insertion order.
    """
    sampled = [e for e in memory.entries.values() if e.sampled]
    if not sampled:
        raise EmptyMemoryError("no sampled candidate in memory")
    return min(sampled, key=lambda e: (-e.mean, -e.sample_count, e.candidate.created_at, e.inserted_seq))


def best_score(memory: Memory) -> float | None:
    try:
        return best_candidate(memory).mean
    except EmptyMemoryError:
        return None


def memory_snapshot(memory: Memory, run_id: str) -> str:
    """Serialize ``memory`` to a JSON document tagged with ``run_id``."""
    snapshot = MemorySnapshot(
        run_id=run_id,
        total_samples=memory.total_samples,
        entries=list(memory.entries.values()),
    )
    return snapshot.model_dump_json(indent=2)


def load_snapshot(text: str) -> tuple[str, Memory]:
    """Inverse of :func:`memory_snapshot`; returns ``(run_id, memory)``."""
    snapshot = MemorySnapshot.model_validate_json(text)
    memory = Memory()
    for entry in sorted(snapshot.entries, key=lambda e: e.inserted_seq):
        if entry.candidate.id in memory.entries:
            raise DuplicateCandidateError(f"snapshot repeats candidate {entry.candidate.id!r}")
        if entry.sample_count != len(entry.observations):
            raise ValueError(
                f"snapshot entry {entry.candidate.id!r} has sample_count {entry.sample_count} "
                f"but {len(entry.observations)} observations"
            )
        memory.entries[entry.candidate.id] = entry
        memory.next_seq = max(memory.next_seq, entry.inserted_seq + 1)

    memory.total_samples = sum(e.sample_count for e in memory.entries.values())
    if memory.total_samples != snapshot.total_samples:
        raise ValueError(
            f"snapshot total_samples {snapshot.total_samples} disagrees with entries ({memory.total_samples})"
        )
    return snapshot.run_id, memory

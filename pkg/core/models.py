# core/models.py
import math

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Candidate(BaseModel):
    """A parameter (prompt, code, or opaque payload) under optimization."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., min_length=1)
    payload: str
    embedding: tuple[float, ...] | None = None
    parent_id: str | None = None
    created_at: int = Field(0, ge=0, description="Iteration that produced the candidate; 0 for the seed")

    @field_validator("embedding")
    @classmethod
    def _finite_embedding(cls, value: tuple[float, ...] | None) -> tuple[float, ...] | None:
        if value is None:
            return value
        if not value:
            raise ValueError("embedding must have at least one dimension")
        if not all(math.isfinite(x) for x in value):
            raise ValueError("embedding must be finite")
        return value


class Task(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = Field(..., min_length=1)
    input: str
    side_info: str = ""


class Observation(BaseModel):
    """One (candidate, task) evaluation."""

    model_config = ConfigDict(frozen=True)

    candidate_id: str
    task_id: str
    output: str = ""
    reward: float
    feedback: str = ""
    iteration: int = Field(..., ge=0)
    failed: bool = False

    @field_validator("reward")
    @classmethod
    def _finite_reward(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("reward must be finite")
        return value


class MemoryEntry(BaseModel):
    candidate: Candidate
    observations: list[Observation] = Field(default_factory=list)
    sample_count: int = Field(0, ge=0)
    mean: float = 0.0
    inserted_seq: int = Field(0, ge=0)

    @property
    def sampled(self) -> bool:
        return self.sample_count > 0


class Memory(BaseModel):
    """Priority-queue memory keyed by candidate id.

    Iteration order of ``entries`` is insertion order. Ordering by priority is
    never stored; strategies rank entries on every read.
    """

    entries: dict[str, MemoryEntry] = Field(default_factory=dict)
    total_samples: int = Field(0, ge=0)
    next_seq: int = Field(0, ge=0)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, candidate_id: object) -> bool:
        return candidate_id in self.entries

    @property
    def latest_generation(self) -> int:
        return max((e.candidate.created_at for e in self.entries.values()), default=0)

    @property
    def has_sampled(self) -> bool:
        return any(e.sampled for e in self.entries.values())


class MemorySnapshot(BaseModel):
    schema_version: int = 1
    run_id: str
    total_samples: int
    entries: list[MemoryEntry]

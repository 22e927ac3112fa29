# engine/models.py
import math
from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.models import Candidate, Memory
from strategies.models import PriorityConfig
from .trace import TraceEvent


class SearchConfig(BaseModel):
    """Knobs of one search run. Defaults follow the published hyperparameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    batch_size: int = Field(2, ge=1)
    num_batches: int = Field(1, ge=1)
    num_candidates: int = Field(5, ge=1, description="Exploration width k")
    epsilon: float = Field(0.1, ge=0.0)
    priority: PriorityConfig = Field(default_factory=PriorityConfig)
    budget_metric_calls: int = Field(200, ge=1)
    max_parallel: int = Field(10, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    summarizer_threshold: float = 0.5
    failure_reward: float = 0.0
    proposals_per_context: int = Field(1, ge=1)
    use_summarizer: bool = True

    @field_validator("summarizer_threshold", "failure_reward")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value

    @property
    def selection(self) -> PriorityConfig:
        """Priority config with ``k`` taken from ``num_candidates``."""
        return self.priority.model_copy(update={"k": self.num_candidates})

    @property
    def evaluations_per_candidate(self) -> int:
        return self.batch_size * self.num_batches


class MetricCounters(BaseModel):
    metric_calls: int = Field(0, ge=0)
    evaluation_steps: int = Field(0, ge=0)
    proposals: int = Field(0, ge=0)
    proposal_steps: int = Field(0, ge=0)


class RunResult(BaseModel):
    run_id: str
    best: Candidate
    best_score: float
    memory: Memory
    counters: MetricCounters
    trace: list[TraceEvent]

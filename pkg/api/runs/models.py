# api/runs/models.py
from datetime import datetime

from pydantic import BaseModel, ConfigDict, Field

from engine.models import MetricCounters, SearchConfig
from oracles.models import SyntheticEnvConfig


class RunCreate(BaseModel):
    model_config = ConfigDict(extra="forbid")

    search: SearchConfig = Field(default_factory=SearchConfig)
    env: SyntheticEnvConfig = Field(default_factory=SyntheticEnvConfig)
    dataset_size: int = Field(10, ge=1, le=10_000, description="Number of synthetic tasks")
    initial_true_mean: float = Field(0.0, ge=0.0, description="True mean of the seed program")


class RunRead(BaseModel):
    id: str
    created_at: datetime
    best_candidate_id: str
    best_payload: str
    best_score: float
    memory_size: int
    counters: MetricCounters

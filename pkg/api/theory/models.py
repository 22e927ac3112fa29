# api/theory/models.py
from pydantic import BaseModel, Field

from oracles.models import FailureMode
from theory.models import HittingTimeReport


class HittingTimeRequest(BaseModel):
    delta0: float = Field(..., gt=0.0, le=1.0)
    levels: int = Field(..., ge=1, le=30)
    replicates: int = Field(2_000, ge=2, le=100_000)
    failure_mode: FailureMode = FailureMode.RESTART
    seed: int = Field(0, ge=0)


class HittingTimeResponse(BaseModel):
    rows: list[HittingTimeReport]

# strategies/models.py
from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field


class PriorityKind(StrEnum):
    MEAN = "mean"
    UCB_THEORY = "ucb_theory"
    UCB_BETA = "ucb_beta"
    LIFO = "lifo"
    BEAM = "beam"


class PriorityConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: PriorityKind = PriorityKind.MEAN
    sigma: float = Field(0.0, ge=0.0, description="Sub-Gaussian reward scale (ucb_theory)")
    beta: float = Field(0.0, ge=0.0, description="Exploration weight (ucb_beta)")
    horizon: int | None = Field(None, ge=1, description="Fixed n for ucb_theory; running total when unset")
    k: int = Field(5, ge=1, description="How many programs are explored per iteration")

    @property
    def width(self) -> int:
        # sequential refinement explores exactly one program
        return 1 if self.kind is PriorityKind.LIFO else self.k

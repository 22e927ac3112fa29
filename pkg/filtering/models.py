# filtering/models.py
from pydantic import BaseModel, ConfigDict, Field


class FilterConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(..., ge=0.0)
    dimension: int = Field(..., gt=0)


class FilterDecision(BaseModel):
    candidate_id: str
    accepted: bool
    # None when there was nothing to compare against (empty memory, first admission)
    min_distance: float | None = None
    epsilon: float


class SeparationViolation(BaseModel):
    first_id: str
    second_id: str
    distance: float


class FilterAudit(BaseModel):
    epsilon: float
    member_count: int
    min_pairwise_distance: float | None = None
    packing_bound: int | None = None
    violations: list[SeparationViolation] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

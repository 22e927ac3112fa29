# theory/models.py
import math
from enum import StrEnum
from fractions import Fraction
from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import PartitionError


def _ratio(numerator: float, denominator: float) -> Fraction:
    # decimal strings keep 1.0 / 0.1 exact instead of inheriting binary rounding
    return Fraction(str(numerator)) / Fraction(str(denominator))


class UpdateRule(StrEnum):
    SEQUENTIAL = "sequential"
    POLCA = "polca"


class EmbeddingLayout(StrEnum):
    # an independent uniform point in [0, 1]^dim per proposal
    UNIFORM = "uniform"
    # a point on the diagonal at distance mean / gamma from the origin; equal rewards coincide
    BY_REWARD = "by_reward"


class IntervalPartition(BaseModel):
    """Reward range [0, cap] cut into intervals of width gamma / 2.

    Interval k (1-based) is [(k - 1) gamma / 2, k gamma / 2].
    """

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(..., gt=0.0)
    cap: float = Field(..., gt=0.0)

    @model_validator(mode="after")
    def _cap_divisible(self) -> Self:
        ratio = _ratio(self.cap, self.gamma / 2)
        if ratio.denominator != 1:
            raise ValueError(f"reward cap {self.cap} is not a multiple of gamma / 2 = {self.gamma / 2}")
        return self

    @property
    def size(self) -> int:
        return int(_ratio(self.cap, self.gamma / 2))

    @property
    def intervals(self) -> list[tuple[float, float]]:
        width = self.gamma / 2
        return [((k - 1) * width, k * width) for k in range(1, self.size + 1)]

    def index_of(self, mean: float) -> int:
        k = max(1, math.ceil(mean / (self.gamma / 2) - 1e-9))
        if k > self.size or mean < 0:
            raise PartitionError(f"true mean {mean} lies outside [0, {self.cap}]")
        return k


class TheoryQuantities(BaseModel):
    u_interval: float = Field(..., gt=0.0)
    u_single: float = Field(..., ge=0.0)
    n_eps: int = Field(..., ge=1)


class HittingPoint(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    delta0: float = Field(..., gt=0.0, le=1.0)
    levels: int = Field(..., ge=1)


class HittingTimeReport(BaseModel):
    rule: UpdateRule
    delta0: float
    levels: int
    replicates: int
    analytic: float | None
    empirical_mean: float
    stderr: float
    passed: bool | None = None


class LogGrowthFit(BaseModel):
    slope: float
    intercept: float
    r_squared: float


class TheoryConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    hitting_grid: list[HittingPoint] = Field(
        default_factory=lambda: [
            HittingPoint(delta0=0.5, levels=5),
            HittingPoint(delta0=0.5, levels=10),
            HittingPoint(delta0=0.8, levels=5),
        ]
    )
    replicates: int = Field(10_000, ge=2)
    cap: float = Field(1.0, gt=0.0)
    gamma: float = Field(0.2, gt=0.0)
    delta0: float = Field(0.5, gt=0.0, le=1.0)
    sigma: float = Field(0.5, ge=0.0)
    epsilon: float = Field(0.1, gt=0.0)
    embedding_dim: int = Field(1, ge=1)
    horizons: list[int] = Field(default_factory=lambda: [1_000, 10_000, 100_000])
    seeds: int = Field(20, ge=1)
    independence_epsilons: list[float] = Field(default_factory=lambda: [0.01, 0.1, 0.5])
    independence_dim: int = Field(2, ge=1)
    independence_horizon: int = Field(1_000, ge=2)
    envelope_constant: float = Field(16.0, gt=0.0)
    tolerance_se: float = Field(3.0, gt=0.0)
    min_r_squared: float = Field(0.9, ge=0.0, le=1.0)
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.gamma > self.cap:
            raise ValueError("gamma must not exceed cap")
        if any(n < 2 for n in self.horizons):
            raise ValueError("every horizon must be at least 2")
        IntervalPartition(gamma=self.gamma, cap=self.cap)
        return self


class TheoryRow(BaseModel):
    experiment: str
    rule: str = ""
    delta0: float
    levels: int | None = None
    sigma: float | None = None
    gamma: float
    cap: float
    horizon: int | None = None
    epsilon: float | None = None
    analytic: float | None = None
    empirical_mean: float
    stderr: float | None = None
    admitted: int | None = None
    passed: bool


class TheorySuiteResult(BaseModel):
    rows: list[TheoryRow]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

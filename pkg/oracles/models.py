# oracles/models.py
from enum import StrEnum
from typing import Self

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import OracleConfigError


class NoiseKind(StrEnum):
    GAUSSIAN = "gaussian"
    BERNOULLI = "bernoulli"
    NONE = "none"


class FailureMode(StrEnum):
    STAY = "stay"
    REGRESS_UNIFORM = "regress_uniform"
    RESTART = "restart"


class JumpKind(StrEnum):
    # uniform: improvement lands anywhere in (mu + gamma, min(mu + 2 gamma, B)]
    # lattice: improvement is exactly one gamma step
    UNIFORM = "uniform"
    LATTICE = "lattice"


class SyntheticEnvConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    reward_cap: float = Field(1.0, gt=0.0)
    gamma: float = Field(0.2, gt=0.0)
    delta0: float = Field(0.5, gt=0.0, le=1.0)
    sigma: float = Field(0.0, ge=0.0)
    noise: NoiseKind = NoiseKind.GAUSSIAN
    failure_mode: FailureMode = FailureMode.STAY
    jump: JumpKind = JumpKind.UNIFORM
    embedding_dim: int = Field(8, gt=0)

    @model_validator(mode="after")
    def _gamma_within_cap(self) -> Self:
        if self.gamma > self.reward_cap:
            raise ValueError(f"gamma ({self.gamma}) must not exceed reward_cap ({self.reward_cap})")
        return self


class SyntheticCandidateState(BaseModel):
    """The hidden true mean of a synthetic program, stored as its payload."""

    model_config = ConfigDict(frozen=True)

    true_mean: float = Field(..., ge=0.0)
    nonce: str = ""

    def to_payload(self) -> str:
        return self.model_dump_json()

    @classmethod
    def from_payload(cls, payload: str) -> "SyntheticCandidateState":
        try:
            return cls.model_validate_json(payload)
        except ValidationError as exc:
            raise OracleConfigError(f"payload is not a synthetic program: {payload[:80]!r}") from exc

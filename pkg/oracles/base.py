# oracles/base.py
"""Async oracle protocols the engine drives.

Every oracle may declare ``concurrent_safe = False``; the engine then runs
all of its work items one at a time.
"""
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.models import Candidate, Task


class GuideResult(BaseModel):
    output: str = ""
    reward: float
    feedback: str = ""


class Rollout(BaseModel):
    model_config = ConfigDict(frozen=True)

    task_id: str
    input: str
    output: str
    reward: float
    feedback: str


class ProposalContext(BaseModel):
    """What the optimizer sees for one explored program: the program, its
    rollouts on this iteration's minibatch, and the shared history summary."""

    model_config = ConfigDict(frozen=True)

    candidate: Candidate
    rollouts: list[Rollout] = Field(default_factory=list)
    history: str = ""


class SummaryPrompt(BaseModel):
    system: str
    user: str


@runtime_checkable
class Guide(Protocol):
    concurrent_safe: bool

    async def evaluate(self, candidate: Candidate, task: Task, rng: np.random.Generator) -> GuideResult: ...


@runtime_checkable
class Optimizer(Protocol):
    concurrent_safe: bool

    async def propose(self, context: ProposalContext, rng: np.random.Generator) -> str: ...


@runtime_checkable
class Embedder(Protocol):
    concurrent_safe: bool

    async def embed(self, payload: str) -> tuple[float, ...]: ...


@runtime_checkable
class Summarizer(Protocol):
    concurrent_safe: bool

    async def summarize(self, prompt: SummaryPrompt) -> str: ...


@dataclass(frozen=True)
class OracleSet:
    guide: Guide
    optimizer: Optimizer
    embedder: Embedder
    summarizer: Summarizer

    @property
    def concurrent_safe(self) -> bool:
        return all(
            getattr(oracle, "concurrent_safe", True)
            for oracle in (self.guide, self.optimizer, self.embedder, self.summarizer)
        )


class IdentitySummarizer:
    """Summarizer stub that hands the rendered trajectory digest back unchanged."""

    concurrent_safe = True

    async def summarize(self, prompt: SummaryPrompt) -> str:
        return prompt.user

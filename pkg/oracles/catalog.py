# oracles/catalog.py
"""Optimizer over a finite, enumerable set of programs.

Each program has a fixed payload, so proposing it twice yields the same
embedding and the second copy is filtered out. Small catalogs make the
reachable optimum computable by brute force.
"""
from collections import deque

import numpy as np
from pydantic import BaseModel, Field

from core.models import Candidate
from .base import ProposalContext
from .errors import OracleConfigError
from .models import SyntheticCandidateState, SyntheticEnvConfig
from .synthetic import synthetic_embed


class CatalogProgram(BaseModel):
    name: str = Field(..., min_length=1)
    true_mean: float = Field(..., ge=0.0)
    successors: list[str] = Field(default_factory=list)

    def payload(self) -> str:
        return SyntheticCandidateState(true_mean=self.true_mean, nonce=self.name).to_payload()


class CatalogOptimizer:
    concurrent_safe = True

    def __init__(self, programs: list[CatalogProgram]):
        self.programs = {p.name: p for p in programs}
        for program in programs:
            unknown = [s for s in program.successors if s not in self.programs]
            if unknown:
                raise OracleConfigError(f"program {program.name!r} lists unknown successors {unknown}")

    def candidate(self, name: str, env: SyntheticEnvConfig, candidate_id: str | None = None) -> Candidate:
        program = self.programs[name]
        payload = program.payload()
        return Candidate(id=candidate_id or name, payload=payload, embedding=synthetic_embed(payload, env.embedding_dim))

    def reachable(self, start: str) -> list[CatalogProgram]:
        seen = {start}
        queue = deque([start])
        while queue:
            for successor in self.programs[queue.popleft()].successors:
                if successor not in seen:
                    seen.add(successor)
                    queue.append(successor)
        return [self.programs[name] for name in seen]

    async def propose(self, context: ProposalContext, rng: np.random.Generator) -> str:
        name = SyntheticCandidateState.from_payload(context.candidate.payload).nonce
        if name not in self.programs:
            raise OracleConfigError(f"candidate {context.candidate.id!r} is not a catalog program")
        program = self.programs[name]
        if not program.successors:
            return program.payload()
        return self.programs[program.successors[int(rng.integers(len(program.successors)))]].payload()

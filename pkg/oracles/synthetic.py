# oracles/synthetic.py
"""Synthetic oracles with a known true mean per program.

The optimizer satisfies the strict-improvement assumption: from a program
with mean ``mu <= B - gamma`` it returns a program better by more than
``gamma`` with probability ``delta0``.
"""
import hashlib

import numpy as np

from core.models import Candidate, Task
from .base import GuideResult, IdentitySummarizer, OracleSet, ProposalContext
from .errors import OracleConfigError
from .models import FailureMode, JumpKind, NoiseKind, SyntheticCandidateState, SyntheticEnvConfig

# slack for float comparisons against the B - gamma boundary
_TOL = 1e-9


def true_mean_of(env: SyntheticEnvConfig, candidate: Candidate) -> float:
    state = SyntheticCandidateState.from_payload(candidate.payload)
    if state.true_mean > env.reward_cap + _TOL:
        raise OracleConfigError(
            f"candidate {candidate.id!r} has true mean {state.true_mean} above the cap {env.reward_cap}"
        )
    return state.true_mean


def sample_reward(env: SyntheticEnvConfig, mu: float, rng: np.random.Generator) -> float:
    if env.noise is NoiseKind.NONE:
        return mu
    if env.noise is NoiseKind.GAUSSIAN:
        return float(rng.normal(mu, env.sigma))
    if not 0.0 <= mu <= 1.0:
        raise OracleConfigError(f"bernoulli rewards need a mean in [0, 1], got {mu}")
    return float(rng.random() < mu)


def guide_score(
    env: SyntheticEnvConfig,
    candidate: Candidate,
    task: Task,
    rng: np.random.Generator,
) -> tuple[float, str]:
    reward = sample_reward(env, true_mean_of(env, candidate), rng)
    return reward, f"task {task.id}: reward {reward:.4f}"


def _snap(env: SyntheticEnvConfig, value: float) -> float:
    levels = value / env.gamma
    if abs(levels - round(levels)) < _TOL:
        value = round(levels) * env.gamma
    return min(value, env.reward_cap)


def propose_true_mean(env: SyntheticEnvConfig, mu: float, rng: np.random.Generator) -> float:
    """True mean of a proposal made from a program with true mean ``mu``."""
    cap, gamma = env.reward_cap, env.gamma
    if mu > cap - gamma + _TOL:
        return mu

    if rng.random() < env.delta0:
        if env.jump is JumpKind.LATTICE:
            return _snap(env, mu + gamma)
        low, high = min(mu + gamma, cap), min(mu + 2 * gamma, cap)
        # high - u * (high - low) covers (low, high] for u in [0, 1)
        return min(high - rng.random() * (high - low), cap)

    if env.failure_mode is FailureMode.STAY:
        return mu
    if env.failure_mode is FailureMode.REGRESS_UNIFORM:
        return float(rng.uniform(0.0, mu)) if mu > 0 else 0.0
    return 0.0


def synthetic_embed(payload: str, dimension: int) -> tuple[float, ...]:
    """Hash-derived point in [0, 1]^dimension; equal payloads give equal points."""
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    return tuple(float(x) for x in rng.random(dimension))


def synthetic_propose(env: SyntheticEnvConfig, context: ProposalContext, rng: np.random.Generator) -> Candidate:
    seed = context.candidate
    new_mean = propose_true_mean(env, true_mean_of(env, seed), rng)
    nonce = f"{int(rng.integers(0, 2**63)):016x}"
    payload = SyntheticCandidateState(true_mean=new_mean, nonce=nonce).to_payload()
    return Candidate(
        id=f"{seed.id}.{nonce[:8]}",
        payload=payload,
        embedding=synthetic_embed(payload, env.embedding_dim),
        parent_id=seed.id,
        created_at=seed.created_at,
    )


def synthetic_seed_candidate(env: SyntheticEnvConfig, true_mean: float = 0.0, candidate_id: str = "theta0") -> Candidate:
    payload = SyntheticCandidateState(true_mean=true_mean, nonce="seed").to_payload()
    return Candidate(id=candidate_id, payload=payload, embedding=synthetic_embed(payload, env.embedding_dim))


def synthetic_dataset(size: int) -> list[Task]:
    if size < 1:
        raise OracleConfigError("a synthetic dataset needs at least one task")
    width = len(str(size - 1))
    return [Task(id=f"t{i:0{width}d}", input=f"synthetic task {i}") for i in range(size)]


class SyntheticGuide:
    concurrent_safe = True

    def __init__(self, env: SyntheticEnvConfig):
        self.env = env

    async def evaluate(self, candidate: Candidate, task: Task, rng: np.random.Generator) -> GuideResult:
        reward, feedback = guide_score(self.env, candidate, task, rng)
        return GuideResult(output=f"{candidate.id} on {task.id}", reward=reward, feedback=feedback)


class SyntheticOptimizer:
    concurrent_safe = True

    def __init__(self, env: SyntheticEnvConfig):
        self.env = env

    async def propose(self, context: ProposalContext, rng: np.random.Generator) -> str:
        return synthetic_propose(self.env, context, rng).payload


class SyntheticEmbedder:
    concurrent_safe = True

    def __init__(self, env: SyntheticEnvConfig):
        self.env = env

    async def embed(self, payload: str) -> tuple[float, ...]:
        return synthetic_embed(payload, self.env.embedding_dim)


def build_synthetic_oracles(env: SyntheticEnvConfig) -> OracleSet:
    return OracleSet(
        guide=SyntheticGuide(env),
        optimizer=SyntheticOptimizer(env),
        embedder=SyntheticEmbedder(env),
        summarizer=IdentitySummarizer(),
    )

# theory/selection.py
"""Single-select, single-propose UCB search and the bookkeeping around it.

Every step selects one program by UCB score with a fixed horizon, samples
one reward for it, proposes one program from it and admits the proposal
only if it is epsilon-far from every program kept so far.
"""
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from engine.trace import TraceEvent, TraceKind
from filtering.semantic import packing_bound
from oracles.errors import OracleConfigError
from oracles.models import SyntheticCandidateState, SyntheticEnvConfig
from oracles.synthetic import propose_true_mean, sample_reward
from strategies.priority import exploration_bonus
from .errors import TraceAnnotationError
from .models import EmbeddingLayout, IntervalPartition, LogGrowthFit, TheoryQuantities


@dataclass(frozen=True)
class SelectionTrace:
    """Which program was selected at each step, plus every program's true mean."""

    selections: np.ndarray
    true_means: np.ndarray

    @property
    def horizon(self) -> int:
        return int(self.selections.size)

    @property
    def admitted(self) -> int:
        """Programs added after the seed."""
        return max(int(self.true_means.size) - 1, 0)

    @classmethod
    def from_events(cls, events: Sequence[TraceEvent]) -> "SelectionTrace":
        """Rebuild the trace of an engine run; every selected program must be synthetic."""
        index: dict[str, int] = {}
        means: list[float] = []
        selections: list[int] = []
        for event in events:
            if event.kind is TraceKind.MEMORY_UPDATE and event.payload.get("action") == "insert":
                candidate = event.payload["candidate"]
                try:
                    state = SyntheticCandidateState.from_payload(candidate["payload"])
                except OracleConfigError as exc:
                    raise TraceAnnotationError(f"candidate {candidate['id']!r} carries no true mean") from exc
                index[candidate["id"]] = len(means)
                means.append(state.true_mean)
            elif event.kind is TraceKind.ITERATION_START:
                for candidate_id in event.payload["selected"]:
                    if candidate_id not in index:
                        raise TraceAnnotationError(f"selected candidate {candidate_id!r} was never inserted")
                    selections.append(index[candidate_id])
        return cls(selections=np.asarray(selections, dtype=np.int64), true_means=np.asarray(means, dtype=float))


def simulate_single_select(
    env: SyntheticEnvConfig,
    n: int,
    epsilon: float,
    dim: int,
    rng: np.random.Generator,
    layout: EmbeddingLayout = EmbeddingLayout.UNIFORM,
) -> SelectionTrace:
    """Run ``n`` select, sample, propose and admit steps.

    Bookkeeping follows the engine: running means as in ``update_stats``,
    the ``select_programs`` order for ucb_theory with horizon ``n``, and
    strict ``distance < epsilon`` rejection as in ``semantic_filter``.
    """
    noise_rng, propose_rng, embed_rng = (np.random.default_rng(s) for s in rng.integers(0, 2**63, size=3))
    scale = 2 * env.sigma
    diagonal = np.full(dim, 1.0 / math.sqrt(dim))

    def place(mean: float) -> np.ndarray:
        if layout is EmbeddingLayout.BY_REWARD:
            return diagonal * (mean / env.gamma)
        return embed_rng.random(dim)

    capacity = 64
    true_means = np.zeros(capacity)
    means = np.zeros(capacity)
    counts = np.zeros(capacity)
    created = np.zeros(capacity, dtype=np.int64)
    embeddings = np.zeros((capacity, dim))
    size = 1
    embeddings[0] = place(0.0)
    selections = np.empty(n, dtype=np.int64)

    for step in range(1, n + 1):
        c = counts[:size]
        unsampled = np.flatnonzero(c == 0)
        if unsampled.size:
            chosen = int(unsampled[0])
        else:
            scores = means[:size] + exploration_bonus(c, n, scale)
            # highest score, then fewer samples, then earlier creation
            chosen = int(np.lexsort((np.arange(size), created[:size], c, -scores))[0])
        selections[step - 1] = chosen

        counts[chosen] += 1
        means[chosen] += (sample_reward(env, true_means[chosen], noise_rng) - means[chosen]) / counts[chosen]

        new_mean = propose_true_mean(env, true_means[chosen], propose_rng)
        point = place(new_mean)
        if np.linalg.norm(embeddings[:size] - point, axis=1).min() < epsilon:
            continue

        if size == capacity:
            capacity *= 2
            true_means, means, counts, created = (np.resize(a, capacity) for a in (true_means, means, counts, created))
            embeddings = np.resize(embeddings, (capacity, dim))
        true_means[size] = new_mean
        means[size] = sample_reward(env, new_mean, noise_rng)
        counts[size] = 1
        created[size] = step
        embeddings[size] = point
        size += 1

    return SelectionTrace(selections=selections, true_means=true_means[:size].copy())


def suboptimal_selection_count(trace: SelectionTrace, partition: IntervalPartition) -> int:
    """Selections of programs whose true mean is at most B - gamma."""
    if trace.selections.size and trace.true_means.size == 0:
        raise TraceAnnotationError("trace has selections but no true means")
    suboptimal = trace.true_means <= partition.cap - partition.gamma + 1e-9
    return int(suboptimal[trace.selections].sum())


def _interval_of_candidates(trace: SelectionTrace, partition: IntervalPartition) -> np.ndarray:
    return np.asarray([partition.index_of(m) for m in trace.true_means], dtype=np.int64)


def interval_stopping_times(trace: SelectionTrace, partition: IntervalPartition, u_interval: float) -> list[int | None]:
    """Step at which interval k has been selected ``ceil(u_interval)`` times, or None."""
    needed = math.ceil(u_interval)
    per_step = _interval_of_candidates(trace, partition)[trace.selections]
    stops: list[int | None] = []
    for k in range(1, partition.size + 1):
        hits = np.flatnonzero(per_step == k)
        stops.append(int(hits[needed - 1]) + 1 if hits.size >= needed else None)
    return stops


def additional_selections(trace: SelectionTrace, partition: IntervalPartition, u_interval: float) -> dict[int, int]:
    """Selections of each program after its interval's stopping time."""
    stops = interval_stopping_times(trace, partition, u_interval)
    intervals = _interval_of_candidates(trace, partition)
    extra: dict[int, int] = {}
    for candidate, k in enumerate(intervals):
        stop = stops[k - 1]
        if stop is None:
            extra[candidate] = 0
            continue
        extra[candidate] = int((trace.selections[stop:] == candidate).sum())
    return extra


def theory_quantities(
    n: int,
    env: SyntheticEnvConfig,
    epsilon: float,
    dim: int,
    side_length: float = 1.0,
) -> TheoryQuantities:
    if n < 2:
        raise ValueError("the horizon must be at least 2")
    log_n = math.log(n)
    return TheoryQuantities(
        u_interval=2 * log_n / env.delta0,
        u_single=64 * env.sigma**2 * log_n / env.gamma**2,
        n_eps=packing_bound(epsilon, dim, side_length),
    )


def selection_envelope(n: int, env: SyntheticEnvConfig, n_eps: int, constant: float = 16.0) -> float:
    """``constant * (B / (2 gamma delta0) + 64 sigma^2 N_eps / gamma^2) * ln n``."""
    per_log = env.reward_cap / (2 * env.gamma * env.delta0) + 64 * env.sigma**2 * n_eps / env.gamma**2
    return constant * per_log * math.log(n)


def log_growth_fit(horizons: Sequence[int], counts: Sequence[float]) -> LogGrowthFit:
    """Least-squares line of count against ln n."""
    x = np.log(np.asarray(horizons, dtype=float))
    y = np.asarray(counts, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = ((y - y.mean()) ** 2).sum()
    r_squared = 1.0 - float((residual**2).sum() / total) if total > 0 else 1.0
    return LogGrowthFit(slope=float(slope), intercept=float(intercept), r_squared=r_squared)

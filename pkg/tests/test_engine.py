from collections import Counter

import numpy as np
import pytest

from core.memory import memory_insert, update_stats
from core.models import Candidate, Memory, Observation, Task
from core.rng import derive_rng
from engine.errors import BudgetError, DatasetError, EvaluationError, ProposalError
from engine.evaluation import evaluate
from engine.loop import run
from engine.minibatch import sample_minibatch
from engine.models import MetricCounters, SearchConfig
from engine.proposal import propose_programs
from engine.summary import SUMMARY_SYSTEM, build_summary_prompt, summarize
from engine.trace import TraceKind
from oracles.base import GuideResult, IdentitySummarizer
from oracles.catalog import CatalogOptimizer, CatalogProgram
from oracles.models import JumpKind, NoiseKind, SyntheticEnvConfig
from oracles.synthetic import (
    SyntheticEmbedder,
    SyntheticGuide,
    SyntheticOptimizer,
    synthetic_dataset,
    synthetic_seed_candidate,
)
from strategies.models import PriorityConfig, PriorityKind

TASKS = [Task(id=f"t{i}", input=f"input {i}") for i in range(5)]


class ConstantGuide:
    concurrent_safe = True

    def __init__(self, reward=1.0, fail_on=()):
        self.reward = reward
        self.fail_on = set(fail_on)

    async def evaluate(self, candidate, task, rng):
        if task.id in self.fail_on:
            raise RuntimeError(f"guide crashed on {task.id}")
        return GuideResult(output="y", reward=self.reward, feedback="fine")


class FlakyOptimizer:
    concurrent_safe = True

    def __init__(self, fail_for=()):
        self.fail_for = set(fail_for)

    async def propose(self, context, rng):
        if context.candidate.id in self.fail_for:
            raise RuntimeError("optimizer refused")
        return f"{context.candidate.payload}+{int(rng.integers(1000))}"


class LengthEmbedder:
    concurrent_safe = True

    async def embed(self, payload):
        return (float(len(payload)), 0.0)


def _cand(cid):
    return Candidate(id=cid, payload=cid)


def _synthetic_run_args(env):
    return dict(
        candidate0=synthetic_seed_candidate(env),
        guide=SyntheticGuide(env),
        optimizer=SyntheticOptimizer(env),
        embedder=SyntheticEmbedder(env),
        summarizer=IdentitySummarizer(),
    )


def test_minibatch_from_single_task_repeats_it():
    batch = sample_minibatch(TASKS[:1], 3, np.random.default_rng(0))
    assert [t.id for t in batch] == ["t0", "t0", "t0"]


def test_minibatch_seed_42_golden():
    assert [t.id for t in sample_minibatch(TASKS, 2, np.random.default_rng(42))] == ["t0", "t3"]
    ten = [Task(id=f"t{i}", input="") for i in range(10)]
    assert [t.id for t in sample_minibatch(ten, 4, np.random.default_rng(42))] == ["t0", "t7", "t6", "t4"]
    engine_streams = [
        [t.id for t in sample_minibatch(TASKS, 2, derive_rng(42, "minibatch", iteration, 0))] for iteration in (1, 2, 3)
    ]
    assert engine_streams == [["t4", "t1"], ["t1", "t0"], ["t0", "t0"]]


class DigitGuide:
    """Reward 1 when the task's digit appears in the program text."""

    concurrent_safe = True

    async def evaluate(self, candidate, task, rng):
        hit = task.id[1:] in candidate.payload
        return GuideResult(output=candidate.payload, reward=1.0 if hit else 0.0, feedback="hit" if hit else "miss")


class DigitOptimizer:
    """Appends the digits of missed tasks, or ``!`` when nothing was missed."""

    concurrent_safe = True

    async def propose(self, context, rng):
        missing = []
        for rollout in context.rollouts:
            digit = rollout.task_id[1:]
            if rollout.reward == 0.0 and digit not in missing:
                missing.append(digit)
        return context.candidate.payload + ("".join(missing) or "!")


async def test_seed_42_run_golden_batches_and_selections():
    config = SearchConfig(batch_size=2, num_candidates=2, budget_metric_calls=18, seed=42)
    result = await run(
        config,
        TASKS,
        Candidate(id="theta0", payload="p"),
        DigitGuide(),
        DigitOptimizer(),
        LengthEmbedder(),
        IdentitySummarizer(),
    )
    starts = [e.payload for e in result.trace if e.kind is TraceKind.ITERATION_START]
    assert [s["batch"] for s in starts] == [["t4", "t1"], ["t1", "t0"], ["t0", "t0"]]
    assert [s["selected"] for s in starts] == [["theta0"], ["c00001", "theta0"], ["c00002", "c00001"]]
    assert {cid: e.candidate.payload for cid, e in result.memory.entries.items()} == {
        "theta0": "p",
        "c00001": "p41",
        "c00002": "p410",
        "c00004": "p410!",
    }
    assert result.counters.metric_calls == 16
    assert result.best.id == "c00002"
    assert result.best_score == 1.0


def test_minibatch_errors():
    with pytest.raises(DatasetError):
        sample_minibatch(TASKS, 0, np.random.default_rng(0))
    with pytest.raises(DatasetError):
        sample_minibatch([], 2, np.random.default_rng(0))


def test_minibatch_is_reproducible():
    first = sample_minibatch(TASKS, 2, np.random.default_rng(42))
    second = sample_minibatch(TASKS, 2, np.random.default_rng(42))
    assert first == second
    assert len(first) == 2


async def test_evaluate_counts_every_pair():
    counters = MetricCounters()
    observations = await evaluate([_cand("b"), _cand("a")], TASKS[:3], ConstantGuide(), counters, iteration=1)
    assert len(observations) == 6
    assert counters.metric_calls == 6
    assert counters.evaluation_steps == 1
    assert [(o.candidate_id, o.task_id) for o in observations] == [
        ("a", "t0"), ("a", "t1"), ("a", "t2"), ("b", "t0"), ("b", "t1"), ("b", "t2"),
    ]


async def test_evaluate_single_pair():
    observations = await evaluate([_cand("a")], TASKS[:1], ConstantGuide(1.0), MetricCounters(), iteration=1)
    assert [o.reward for o in observations] == [1.0]


async def test_guide_failure_becomes_failed_observation():
    counters = MetricCounters()
    observations = await evaluate(
        [_cand("a")], TASKS[:2], ConstantGuide(fail_on={"t1"}), counters, iteration=1, failure_reward=-1.0
    )
    failed = [o for o in observations if o.failed]
    assert len(failed) == 1
    assert failed[0].reward == -1.0
    assert "crashed on t1" in failed[0].feedback
    assert counters.metric_calls == 2


async def test_all_failures_raise_after_counting():
    counters = MetricCounters()
    with pytest.raises(EvaluationError):
        await evaluate([_cand("a")], TASKS[:2], ConstantGuide(fail_on={"t0", "t1"}), counters, iteration=1)
    assert counters.metric_calls == 2


async def test_evaluation_order_does_not_depend_on_parallelism():
    env = SyntheticEnvConfig(sigma=0.3)
    candidates = [synthetic_seed_candidate(env, 0.5, cid) for cid in ("x", "y", "z")]
    serial = await evaluate(candidates, TASKS, SyntheticGuide(env), MetricCounters(), iteration=2, seed=9, max_parallel=1)
    parallel = await evaluate(candidates, TASKS, SyntheticGuide(env), MetricCounters(), iteration=2, seed=9, max_parallel=8)
    assert serial == parallel


def _explored(ids):
    return [(_cand(cid), [Observation(candidate_id=cid, task_id="t0", reward=0.5, iteration=1)]) for cid in ids]


def _id_source():
    numbers = iter(range(1, 1000))
    return lambda: f"n{next(numbers)}"


async def test_propose_counts_successful_proposals():
    counters = MetricCounters()
    proposals = await propose_programs(
        FlakyOptimizer(),
        _explored(["a", "b", "c", "d", "e"]),
        "history",
        counters,
        embedder=LengthEmbedder(),
        tasks={t.id: t for t in TASKS},
        next_id=_id_source(),
        iteration=1,
    )
    assert len(proposals) == 5
    assert counters.proposals == 5
    assert counters.proposal_steps == 1
    assert [p.parent_id for p in proposals] == ["a", "b", "c", "d", "e"]
    assert [p.id for p in proposals] == ["n1", "n2", "n3", "n4", "n5"]
    assert all(p.embedding is not None and p.created_at == 1 for p in proposals)


async def test_optimizer_failure_skips_only_that_context():
    counters = MetricCounters()
    failures = []
    proposals = await propose_programs(
        FlakyOptimizer(fail_for={"b"}),
        _explored(["a", "b"]),
        "",
        counters,
        embedder=LengthEmbedder(),
        tasks={},
        next_id=_id_source(),
        iteration=1,
        failures=failures,
    )
    assert [p.parent_id for p in proposals] == ["a"]
    assert failures == [("b", "optimizer refused")]
    assert counters.proposals == 1
    assert counters.proposal_steps == 1


async def test_propose_needs_explored_candidates():
    with pytest.raises(ProposalError):
        await propose_programs(
            FlakyOptimizer(), [], "", MetricCounters(), embedder=LengthEmbedder(), tasks={}, next_id=_id_source(), iteration=1
        )


def _memory_with(rewards):
    memory = Memory()
    memory_insert(memory, _cand("a"))
    update_stats(memory, [Observation(candidate_id="a", task_id=f"t{i}", reward=r, iteration=1) for i, r in enumerate(rewards)])
    return memory


async def test_summary_has_one_contrastive_pair():
    text = await summarize(_memory_with([1.0, 0.0]), 0.5, np.random.default_rng(0), IdentitySummarizer())
    assert text.count("Successful trajectory") == 1
    assert text.count("Failed trajectory") == 1
    assert "<reasoning>" in text
    assert "<summary>" in text


async def test_summary_with_only_successes():
    text = await summarize(_memory_with([0.9, 0.8]), 0.5, np.random.default_rng(0), IdentitySummarizer())
    assert text.count("Successful trajectory") == 1
    assert "Failed trajectory" not in text


def test_summary_prompt_renders_contrastive_template():
    memory = _memory_with([1.0, 0.0])
    prompt = build_summary_prompt(memory, 0.5, np.random.default_rng(0))
    assert prompt.system == SUMMARY_SYSTEM
    assert prompt.system.startswith("You are an expert at analyzing program behavior patterns")
    assert prompt.user.startswith(
        "Analyze the following program rollout trajectories and extract insights for optimization. "
        "For each program, a successful and a failed trajectory are provided for contrastive analysis."
    )
    assert "Trajectories (1 programs, success threshold 0.5):" in prompt.user
    assert "### Program a (mean 0.5000 over 2 samples)" in prompt.user
    assert "Successful trajectory (reward 1.0000) on task t0" in prompt.user
    assert "Failed trajectory (reward 0.0000) on task t1" in prompt.user
    assert prompt.user.index("<reasoning>") < prompt.user.index("<summary>")
    assert "{" not in prompt.user


async def test_run_rejects_budget_below_one_evaluation():
    env = SyntheticEnvConfig(noise=NoiseKind.NONE)
    config = SearchConfig(batch_size=4, budget_metric_calls=3)
    with pytest.raises(BudgetError):
        await run(config, synthetic_dataset(5), **_synthetic_run_args(env))


async def test_run_rejects_empty_dataset():
    env = SyntheticEnvConfig(noise=NoiseKind.NONE)
    with pytest.raises(DatasetError):
        await run(SearchConfig(), [], **_synthetic_run_args(env))


async def test_small_budget_only_evaluates_the_seed():
    env = SyntheticEnvConfig(noise=NoiseKind.NONE)
    result = await run(SearchConfig(batch_size=2, budget_metric_calls=3), synthetic_dataset(5), **_synthetic_run_args(env))
    assert result.best.id == "theta0"
    assert result.counters.metric_calls == 2
    assert result.counters.proposal_steps == 0
    assert result.trace[-1].kind is TraceKind.RUN_END


async def test_lattice_env_reaches_the_cap_in_two_steps():
    env = SyntheticEnvConfig(
        reward_cap=1.0, gamma=0.5, delta0=1.0, sigma=0.0, noise=NoiseKind.NONE, jump=JumpKind.LATTICE
    )
    config = SearchConfig(batch_size=2, epsilon=0.01, budget_metric_calls=12)
    result = await run(config, synthetic_dataset(5), **_synthetic_run_args(env))
    assert result.counters.proposal_steps == 2
    assert result.best_score == pytest.approx(1.0)


async def _synthetic_result(seed=3, max_parallel=10, budget=60, sigma=0.2):
    env = SyntheticEnvConfig(sigma=sigma, delta0=0.5, embedding_dim=4)
    config = SearchConfig(batch_size=2, epsilon=0.05, budget_metric_calls=budget, seed=seed, max_parallel=max_parallel)
    return await run(config, synthetic_dataset(6), **_synthetic_run_args(env))


async def test_trace_accounts_for_every_metric_call():
    result = await _synthetic_result()
    evaluations = [e for e in result.trace if e.kind is TraceKind.EVALUATION]
    assert len(evaluations) == result.counters.metric_calls
    assert result.counters.metric_calls <= 60
    assert result.trace[-1].payload["counters"] == result.counters.model_dump()


async def test_explored_and_new_programs_share_the_minibatch():
    result = await _synthetic_result()
    batches = {e.iteration: e.payload["batch"] for e in result.trace if e.kind is TraceKind.ITERATION_START}
    per_candidate: dict[tuple[int, str], Counter] = {}
    for event in result.trace:
        if event.kind is TraceKind.EVALUATION:
            key = (event.iteration, event.payload["candidate_id"])
            per_candidate.setdefault(key, Counter())[event.payload["task_id"]] += 1
    for (iteration, _), tasks in per_candidate.items():
        assert tasks == Counter(batches[iteration])


async def test_budget_is_never_exceeded():
    for budget in (2, 5, 9, 17, 33):
        result = await _synthetic_result(budget=budget)
        assert result.counters.metric_calls <= budget


async def test_deterministic_best_so_far_never_drops():
    result = await _synthetic_result(sigma=0.0)
    scores = [e.payload["best_score"] for e in result.trace if e.payload.get("action") == "stats"]
    assert scores == sorted(scores)


async def test_serial_replay_is_identical():
    first = await _synthetic_result(seed=17, max_parallel=1)
    second = await _synthetic_result(seed=17, max_parallel=1)
    assert [e.model_dump() for e in first.trace] == [e.model_dump() for e in second.trace]
    parallel = await _synthetic_result(seed=17, max_parallel=10)
    assert [e.model_dump() for e in parallel.trace] == [e.model_dump() for e in first.trace]


async def test_lifo_always_explores_the_newest_program():
    env = SyntheticEnvConfig(sigma=0.1, embedding_dim=4)
    config = SearchConfig(
        batch_size=2, budget_metric_calls=40, priority=PriorityConfig(kind=PriorityKind.LIFO), seed=5
    )
    result = await run(config, synthetic_dataset(4), **_synthetic_run_args(env))
    created = {"theta0": 0}
    for event in result.trace:
        if event.kind is TraceKind.MEMORY_UPDATE and event.payload["action"] == "insert":
            created[event.payload["candidate"]["id"]] = event.iteration
        if event.kind is TraceKind.ITERATION_START:
            (selected,) = event.payload["selected"]
            newest = max(created.values())
            assert created[selected] == newest


async def test_beam_only_explores_the_newest_generation():
    env = SyntheticEnvConfig(sigma=0.1, embedding_dim=4)
    config = SearchConfig(
        batch_size=2, budget_metric_calls=80, priority=PriorityConfig(kind=PriorityKind.BEAM, k=3), seed=7
    )
    result = await run(config, synthetic_dataset(4), **_synthetic_run_args(env))
    created = {"theta0": 0}
    explored = 0
    for event in result.trace:
        if event.kind is TraceKind.MEMORY_UPDATE and event.payload["action"] == "insert":
            created[event.payload["candidate"]["id"]] = event.payload["candidate"]["created_at"]
        if event.kind is TraceKind.ITERATION_START:
            newest = max(created.values())
            assert event.payload["selected"]
            assert all(created[cid] == newest for cid in event.payload["selected"])
            explored += 1
    assert explored >= 2


async def test_catalog_search_finds_the_reachable_optimum():
    env = SyntheticEnvConfig(noise=NoiseKind.NONE, embedding_dim=4)
    catalog = CatalogOptimizer(
        [
            CatalogProgram(name="A", true_mean=0.2, successors=["B", "C"]),
            CatalogProgram(name="B", true_mean=0.5, successors=["C"]),
            CatalogProgram(name="C", true_mean=0.9),
        ]
    )
    optimum = max(p.true_mean for p in catalog.reachable("A"))
    for seed in range(100):
        config = SearchConfig(batch_size=2, epsilon=0.01, budget_metric_calls=40, seed=seed)
        result = await run(
            config,
            synthetic_dataset(3),
            catalog.candidate("A", env),
            SyntheticGuide(env),
            catalog,
            SyntheticEmbedder(env),
            IdentitySummarizer(),
        )
        assert result.best_score == pytest.approx(optimum)

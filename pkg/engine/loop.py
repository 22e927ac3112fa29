# engine/loop.py
"""The search loop.

Each iteration samples one minibatch, evaluates the highest-priority
programs on it, summarizes memory, proposes new programs, keeps the
epsilon-separated ones, and evaluates those on the same minibatch.
"""
import hashlib
import logging
from collections.abc import Callable, Sequence

from core.memory import best_candidate, best_score, memory_insert, update_stats
from core.models import Candidate, Memory, Observation, Task
from core.rng import derive_rng
from filtering.models import FilterConfig
from filtering.semantic import semantic_filter
from oracles.base import Embedder, Guide, OracleSet, Optimizer, Summarizer
from strategies.priority import select_programs
from .errors import BudgetError, DatasetError
from .evaluation import evaluate
from .minibatch import sample_minibatch
from .models import MetricCounters, RunResult, SearchConfig
from .proposal import propose_programs
from .summary import summarize
from .trace import TraceEvent, TraceKind, TraceRecorder

logger = logging.getLogger(__name__)


def derive_run_id(config: SearchConfig, dataset: Sequence[Task], candidate0: Candidate) -> str:
    digest = hashlib.sha256()
    digest.update(config.model_dump_json().encode("utf-8"))
    digest.update(candidate0.payload.encode("utf-8"))
    for task in dataset:
        digest.update(task.id.encode("utf-8"))
    return f"run-{digest.hexdigest()[:12]}"


def candidate_digest(candidate: Candidate) -> dict:
    return candidate.model_dump(mode="json", exclude={"embedding"})


class SearchEngine:
    def __init__(
        self,
        config: SearchConfig,
        oracles: OracleSet,
        *,
        listener: Callable[[TraceEvent], None] | None = None,
    ):
        self.config = config
        self.oracles = oracles
        self.memory = Memory()
        self.counters = MetricCounters()
        self.recorder = TraceRecorder(listener)
        self._next_number = 0

    def _next_id(self) -> str:
        self._next_number += 1
        return f"c{self._next_number:05d}"

    def _check_preconditions(self, dataset: Sequence[Task]) -> None:
        if not dataset:
            raise DatasetError("dataset is empty")
        ids = [task.id for task in dataset]
        if len(set(ids)) != len(ids):
            raise DatasetError("dataset task ids are not unique")
        per_candidate = self.config.evaluations_per_candidate
        if self.config.budget_metric_calls < per_candidate:
            raise BudgetError(
                f"budget of {self.config.budget_metric_calls} metric calls cannot cover one "
                f"evaluation of {per_candidate} tasks"
            )

    def _sample_batch(self, dataset: Sequence[Task], iteration: int) -> list[Task]:
        batch: list[Task] = []
        for index in range(self.config.num_batches):
            rng = derive_rng(self.config.seed, "minibatch", iteration, index)
            batch.extend(sample_minibatch(dataset, self.config.batch_size, rng))
        return batch

    def _record_stats(self, iteration: int) -> None:
        self.recorder.record(
            iteration,
            TraceKind.MEMORY_UPDATE,
            action="stats",
            entries=len(self.memory),
            total_samples=self.memory.total_samples,
            best_score=best_score(self.memory),
        )

    async def _evaluate(
        self, candidates: Sequence[Candidate], batch: Sequence[Task], iteration: int, phase: str
    ) -> list[Observation]:
        observations = await evaluate(
            candidates,
            batch,
            self.oracles.guide,
            self.counters,
            iteration=iteration,
            phase=phase,
            seed=self.config.seed,
            max_parallel=self.config.max_parallel,
            failure_reward=self.config.failure_reward,
        )
        for obs in observations:
            self.recorder.record(
                iteration,
                TraceKind.EVALUATION,
                phase=phase,
                evaluation_step=self.counters.evaluation_steps,
                **obs.model_dump(mode="json", exclude={"iteration"}),
            )
        update_stats(self.memory, observations)
        self._record_stats(iteration)
        return observations

    def _insert(self, candidate: Candidate, iteration: int) -> None:
        memory_insert(self.memory, candidate)
        self.recorder.record(iteration, TraceKind.MEMORY_UPDATE, action="insert", candidate=candidate_digest(candidate))

    def _iteration_cost(self) -> tuple[int, int]:
        """(explore cost, worst-case full cost) of the next iteration in metric calls."""
        width = len(select_programs(self.memory, self.config.selection))
        explore = width * self.config.evaluations_per_candidate
        return explore, explore * (1 + self.config.proposals_per_context)

    async def run(self, dataset: Sequence[Task], candidate0: Candidate, run_id: str | None = None) -> RunResult:
        self._check_preconditions(dataset)
        config = self.config
        run_id = run_id or derive_run_id(config, dataset, candidate0)
        tasks = {task.id: task for task in dataset}

        theta0 = candidate0.model_copy(update={"created_at": 0})
        if theta0.embedding is None:
            theta0 = theta0.model_copy(update={"embedding": tuple(await self.oracles.embedder.embed(theta0.payload))})
        filter_config = FilterConfig(epsilon=config.epsilon, dimension=len(theta0.embedding))
        self._insert(theta0, 0)

        iteration = 0
        while True:
            remaining = config.budget_metric_calls - self.counters.metric_calls
            explore_cost, full_cost = self._iteration_cost()
            explore_only = False
            if full_cost > remaining:
                # the seed still gets its first evaluation when only that fits
                if self.memory.has_sampled or explore_cost > remaining:
                    break
                explore_only = True

            iteration += 1
            batch = self._sample_batch(dataset, iteration)
            selected = select_programs(self.memory, config.selection)
            self.recorder.record(
                iteration,
                TraceKind.ITERATION_START,
                batch=[task.id for task in batch],
                selected=[c.id for c in selected],
                counters=self.counters.model_dump(),
            )

            explore_obs = await self._evaluate(selected, batch, iteration, "explore")
            if explore_only:
                logger.info("budget only covers the seed evaluation; stopping after iteration %d", iteration)
                break

            history = ""
            if config.use_summarizer:
                rng = derive_rng(config.seed, "summary", iteration)
                history = await summarize(self.memory, config.summarizer_threshold, rng, self.oracles.summarizer)
            self.recorder.record(iteration, TraceKind.SUMMARY, enabled=config.use_summarizer, text=history)

            by_candidate: dict[str, list[Observation]] = {c.id: [] for c in selected}
            for obs in explore_obs:
                by_candidate[obs.candidate_id].append(obs)

            failures: list[tuple[str, str]] = []
            raw = await propose_programs(
                self.oracles.optimizer,
                [(c, by_candidate[c.id]) for c in selected],
                history,
                self.counters,
                embedder=self.oracles.embedder,
                tasks=tasks,
                next_id=self._next_id,
                iteration=iteration,
                seed=config.seed,
                max_parallel=config.max_parallel,
                proposals_per_context=config.proposals_per_context,
                failures=failures,
            )
            for candidate in raw:
                self.recorder.record(
                    iteration,
                    TraceKind.PROPOSAL,
                    proposal_step=self.counters.proposal_steps,
                    parent_id=candidate.parent_id,
                    candidate=candidate_digest(candidate),
                    error=None,
                )
            for parent_id, error in failures:
                self.recorder.record(
                    iteration,
                    TraceKind.PROPOSAL,
                    proposal_step=self.counters.proposal_steps,
                    parent_id=parent_id,
                    candidate=None,
                    error=error,
                )

            accepted, decisions = semantic_filter(raw, self.memory, filter_config)
            for decision in decisions:
                self.recorder.record(iteration, TraceKind.FILTER_DECISION, **decision.model_dump(mode="json"))
                if not decision.accepted:
                    logger.debug("filter rejected %s (distance %s)", decision.candidate_id, decision.min_distance)

            for candidate in accepted:
                self._insert(candidate, iteration)
            if accepted:
                await self._evaluate(accepted, batch, iteration, "new")

            logger.info(
                "iteration %d: explored %d, admitted %d/%d, best %.4f, metric calls %d/%d",
                iteration,
                len(selected),
                len(accepted),
                len(raw),
                best_score(self.memory),
                self.counters.metric_calls,
                config.budget_metric_calls,
            )

        best = best_candidate(self.memory)
        self.recorder.record(
            iteration,
            TraceKind.RUN_END,
            counters=self.counters.model_dump(),
            best_candidate_id=best.candidate.id,
            best_score=best.mean,
        )
        return RunResult(
            run_id=run_id,
            best=best.candidate,
            best_score=best.mean,
            memory=self.memory,
            counters=self.counters,
            trace=self.recorder.events,
        )


async def run(
    config: SearchConfig,
    dataset: Sequence[Task],
    candidate0: Candidate,
    guide: Guide,
    optimizer: Optimizer,
    embedder: Embedder,
    summarizer: Summarizer,
    *,
    run_id: str | None = None,
    listener: Callable[[TraceEvent], None] | None = None,
) -> RunResult:
    """Run the search until the metric-call budget cannot cover another iteration."""
    oracles = OracleSet(guide=guide, optimizer=optimizer, embedder=embedder, summarizer=summarizer)
    engine = SearchEngine(config, oracles, listener=listener)
    return await engine.run(dataset, candidate0, run_id=run_id)

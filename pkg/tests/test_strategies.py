import math

import numpy as np
import pytest
from pydantic import ValidationError

from core.errors import EmptyMemoryError
from core.memory import memory_insert, update_stats
from core.models import Candidate, Memory, Observation
from strategies.models import PriorityConfig, PriorityKind
from strategies.priority import exploration_bonus, priority, select_programs


def test_ucb_theory_value(make_memory):
    memory = make_memory({"a": [0.25, 0.75]})
    config = PriorityConfig(kind=PriorityKind.UCB_THEORY, sigma=0.5, horizon=100)
    expected = 0.5 + 2 * 0.5 * math.sqrt(math.log(100) / 2)
    assert priority(memory.entries["a"], memory, config) == pytest.approx(expected, abs=1e-9)


def test_ucb_theory_uses_running_total_without_horizon(make_memory):
    memory = make_memory({"a": [0.5, 0.5], "b": [0.0, 0.0, 0.0]})
    config = PriorityConfig(kind=PriorityKind.UCB_THEORY, sigma=0.5)
    expected = 0.5 + math.sqrt(math.log(5) / 2)
    assert priority(memory.entries["a"], memory, config) == pytest.approx(expected)


def test_mean_priority(make_memory):
    memory = make_memory({"a": [0.0, 1.0, 1.0]})
    assert priority(memory.entries["a"], memory, PriorityConfig()) == pytest.approx(2 / 3)


def test_zero_sigma_reduces_to_mean(make_memory):
    memory = make_memory({"a": [0.3, 0.4], "b": [0.9]})
    config = PriorityConfig(kind=PriorityKind.UCB_THEORY, sigma=0.0, horizon=1000)
    assert priority(memory.entries["a"], memory, config) == memory.entries["a"].mean


def test_ucb_beta(make_memory):
    memory = make_memory({"a": [1.0], "b": [0.0, 0.0, 0.0]})
    config = PriorityConfig(kind=PriorityKind.UCB_BETA, beta=0.3)
    assert priority(memory.entries["a"], memory, config) == pytest.approx(1.0 + 0.3 * math.sqrt(math.log(4)))


def test_unsampled_entries_rank_first(make_memory):
    memory = make_memory({"a": [1.0, 1.0], "fresh": []})
    for kind in (PriorityKind.MEAN, PriorityKind.UCB_THEORY, PriorityKind.UCB_BETA):
        config = PriorityConfig(kind=kind, sigma=0.5, beta=1.0, k=1)
        assert priority(memory.entries["fresh"], memory, config) == math.inf
        assert [c.id for c in select_programs(memory, config)] == ["fresh"]


def test_small_n_gives_infinite_bonus():
    assert exploration_bonus(3, 0.5, 1.0) == math.inf
    assert exploration_bonus(3, 0.5, 0.0) == 0.0


def test_bonus_vectorised_matches_scalar():
    counts = np.array([1, 2, 5, 40])
    vector = exploration_bonus(counts, 250, 0.7)
    for count, value in zip(counts, vector):
        assert value == pytest.approx(exploration_bonus(int(count), 250, 0.7))


def test_ucb_decreases_in_count_and_increases_in_n():
    assert exploration_bonus(2, 100, 1.0) > exploration_bonus(3, 100, 1.0)
    assert exploration_bonus(2, 200, 1.0) > exploration_bonus(2, 100, 1.0)


def test_selection_tie_goes_to_fewer_samples(make_memory):
    memory = make_memory({"a": [0.9, 0.9, 0.9], "b": [0.5], "c": [0.9]})
    assert [c.id for c in select_programs(memory, PriorityConfig(k=2))] == ["c", "a"]


def test_selection_with_k_above_size_returns_everything(make_memory):
    memory = make_memory({"a": [0.1], "b": [0.2]})
    assert [c.id for c in select_programs(memory, PriorityConfig(k=10))] == ["b", "a"]


def test_selection_from_empty_memory():
    with pytest.raises(EmptyMemoryError):
        select_programs(Memory(), PriorityConfig())


def test_selection_order_invariant_under_rescaling(make_memory):
    rewards = {"a": [0.2, 0.4], "b": [0.7], "c": [0.1, 0.15, 0.3], "d": [0.5]}
    config = PriorityConfig(k=4)
    order = [c.id for c in select_programs(make_memory(rewards), config)]
    scaled = {k: [12.0 * r for r in v] for k, v in rewards.items()}
    assert [c.id for c in select_programs(make_memory(scaled), config)] == order


def test_lifo_picks_newest_only(make_memory):
    memory = make_memory({"old": [1.0], "mid": [0.0], "new": [0.2]})
    config = PriorityConfig(kind=PriorityKind.LIFO, k=5)
    assert config.width == 1
    assert [c.id for c in select_programs(memory, config)] == ["new"]


def test_lifo_accepts_unsampled_entries():
    memory = Memory()
    memory_insert(memory, Candidate(id="a", payload="a", created_at=3))
    assert priority(memory.entries["a"], memory, PriorityConfig(kind=PriorityKind.LIFO)) == 3.0


def test_beam_discards_older_generations():
    memory = Memory()
    for cid, created_at, reward in [("g0", 0, 1.0), ("g1a", 1, 0.4), ("g1b", 1, 0.6)]:
        memory_insert(memory, Candidate(id=cid, payload=cid, created_at=created_at))
        update_stats(memory, [Observation(candidate_id=cid, task_id="t0", reward=reward, iteration=created_at)])
    config = PriorityConfig(kind=PriorityKind.BEAM, k=5)
    assert priority(memory.entries["g0"], memory, config) == -math.inf
    assert [c.id for c in select_programs(memory, config)] == ["g1b", "g1a"]


def test_priority_config_rejects_unknown_fields():
    with pytest.raises(ValidationError):
        PriorityConfig(kind="mean", temperature=1.0)

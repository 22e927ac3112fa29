# engine/summary.py
"""History summarization with contrastive sampling.

Each program's observations are split at the threshold into successes
(reward above it) and failures. One of each is drawn per program and
rendered into a prompt for the summarizer oracle.
"""
import numpy as np

from core.models import Memory, MemoryEntry, Observation
from oracles.base import Summarizer, SummaryPrompt

SUMMARY_SYSTEM = (
    "You are an expert at analyzing program behavior patterns and providing actionable guidance "
    "for parameter optimization."
)

SUMMARY_TEMPLATE = """Analyze the following program rollout trajectories and extract insights for optimization. For each program, a successful and a failed trajectory are provided for contrastive analysis.

Trajectories ({count} programs, success threshold {threshold}):
{trajectories}

Provide your analysis in XML format:
<reasoning>Analyze the key patterns and strategies that led to success or failure in these trajectories.</reasoning>
<summary>Concrete recommendations for improving output quality based on successful or failed patterns observed.</summary>"""


def _pick(observations: list[Observation], rng: np.random.Generator) -> Observation | None:
    if not observations:
        return None
    return observations[int(rng.integers(len(observations)))]


def contrastive_pairs(
    memory: Memory,
    threshold: float,
    rng: np.random.Generator,
) -> list[tuple[MemoryEntry, Observation | None, Observation | None]]:
    """(entry, success, failure) for every sampled entry, in insertion order."""
    pairs = []
    for entry in memory.entries.values():
        if not entry.observations:
            continue
        successes = [o for o in entry.observations if o.reward > threshold]
        failures = [o for o in entry.observations if o.reward <= threshold]
        pairs.append((entry, _pick(successes, rng), _pick(failures, rng)))
    return pairs


def _render_observation(label: str, obs: Observation) -> str:
    return (
        f"{label} trajectory (reward {obs.reward:.4f}) on task {obs.task_id}\n"
        f"output: {obs.output}\n"
        f"feedback: {obs.feedback}"
    )


def render_trajectories(memory: Memory, threshold: float, rng: np.random.Generator) -> tuple[int, str]:
    blocks = []
    pairs = contrastive_pairs(memory, threshold, rng)
    for entry, success, failure in pairs:
        lines = [
            f"### Program {entry.candidate.id} (mean {entry.mean:.4f} over {entry.sample_count} samples)",
            "<parameter>",
            entry.candidate.payload,
            "</parameter>",
        ]
        if success is not None:
            lines.append(_render_observation("Successful", success))
        if failure is not None:
            lines.append(_render_observation("Failed", failure))
        blocks.append("\n".join(lines))
    return len(pairs), "\n\n".join(blocks)


def build_summary_prompt(memory: Memory, threshold: float, rng: np.random.Generator) -> SummaryPrompt:
    count, trajectories = render_trajectories(memory, threshold, rng)
    user = SUMMARY_TEMPLATE.format(count=count, threshold=threshold, trajectories=trajectories)
    return SummaryPrompt(system=SUMMARY_SYSTEM, user=user)


async def summarize(memory: Memory, threshold: float, rng: np.random.Generator, summarizer: Summarizer) -> str:
    if not memory.entries:
        raise ValueError("cannot summarize an empty memory")
    return await summarizer.summarize(build_summary_prompt(memory, threshold, rng))

# llm/prompts.py
"""Optimizer prompt. Context is laid out as: current parameter, its rollouts
on this iteration's minibatch, then the history summary."""
from oracles.base import ProposalContext

OPTIMIZER_SYSTEM = (
    "You improve a parameter of a program: a prompt, a piece of code, or any text the program "
    "depends on. You are shown the current parameter, how the program did with it on a few "
    "tasks, and guidance distilled from earlier attempts. Write an improved parameter."
)

OPTIMIZER_TEMPLATE = """## Current parameter
```
{parameter}
```

## Rollouts on the current minibatch
{rollouts}

## Guidance from the search history
{history}

Return the complete new parameter inside a single fenced code block. Do not include anything else in the block."""


def render_rollouts(context: ProposalContext) -> str:
    if not context.rollouts:
        return "(none)"
    blocks = []
    for i, rollout in enumerate(context.rollouts, start=1):
        blocks.append(
            f"### Rollout {i} (task {rollout.task_id}, reward {rollout.reward:.4f})\n"
            f"input: {rollout.input}\n"
            f"output: {rollout.output}\n"
            f"feedback: {rollout.feedback}"
        )
    return "\n\n".join(blocks)


def render_optimizer_prompt(context: ProposalContext) -> str:
    return OPTIMIZER_TEMPLATE.format(
        parameter=context.candidate.payload,
        rollouts=render_rollouts(context),
        history=context.history.strip() or "(none yet)",
    )

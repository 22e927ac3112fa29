# llm/oracles.py
import string

import httpx
import numpy as np

from core.models import Candidate, Task
from oracles.base import GuideResult, IdentitySummarizer, OracleSet, ProposalContext, SummaryPrompt
from .client import LlmClient
from .models import ChatMessage, LlmEndpointConfig
from .parsing import extract_tag, parse_proposal
from .prompts import OPTIMIZER_SYSTEM, render_optimizer_prompt


class LlmOptimizer:
    concurrent_safe = True

    def __init__(self, client: LlmClient):
        self.client = client

    async def propose(self, context: ProposalContext, rng: np.random.Generator) -> str:
        reply = await self.client.chat_complete(
            [
                ChatMessage(role="system", content=OPTIMIZER_SYSTEM),
                ChatMessage(role="user", content=render_optimizer_prompt(context)),
            ]
        )
        return parse_proposal(reply)


class LlmSummarizer:
    concurrent_safe = True

    def __init__(self, client: LlmClient):
        self.client = client

    async def summarize(self, prompt: SummaryPrompt) -> str:
        reply = await self.client.chat_complete(
            [ChatMessage(role="system", content=prompt.system), ChatMessage(role="user", content=prompt.user)]
        )
        return extract_tag(reply, "summary") or reply.strip()


class LlmEmbedder:
    concurrent_safe = True

    def __init__(self, client: LlmClient):
        self.client = client

    async def embed(self, payload: str) -> tuple[float, ...]:
        return await self.client.embed(payload)


def _normalize_answer(text: str) -> str:
    return text.strip().rstrip(string.punctuation).strip().casefold()


class ReferenceMatchGuide:
    """Runs the parameter as a system prompt and checks the reply against the
    task's reference answer (its side info)."""

    concurrent_safe = True

    def __init__(self, client: LlmClient):
        self.client = client

    async def evaluate(self, candidate: Candidate, task: Task, rng: np.random.Generator) -> GuideResult:
        output = await self.client.chat_complete(
            [ChatMessage(role="system", content=candidate.payload), ChatMessage(role="user", content=task.input)]
        )
        expected = _normalize_answer(task.side_info)
        got = _normalize_answer(output)
        if expected and (got == expected or expected in got):
            return GuideResult(output=output, reward=1.0, feedback="Correct.")
        return GuideResult(
            output=output,
            reward=0.0,
            feedback=f"Incorrect: expected {task.side_info.strip()!r}.",
        )


def build_llm_oracles(
    chat: LlmEndpointConfig,
    embedding: LlmEndpointConfig,
    *,
    http_client: httpx.AsyncClient | None = None,
    use_summarizer_model: bool = True,
) -> OracleSet:
    chat_client = LlmClient(chat, http_client)
    return OracleSet(
        guide=ReferenceMatchGuide(chat_client),
        optimizer=LlmOptimizer(chat_client),
        embedder=LlmEmbedder(LlmClient(embedding, http_client)),
        summarizer=LlmSummarizer(chat_client) if use_summarizer_model else IdentitySummarizer(),
    )

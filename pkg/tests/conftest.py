import os

os.environ.setdefault("MODE", "test")

import httpx
import pytest
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from httpx import AsyncClient, ASGITransport

# Import the app and registry helpers from the project.
from main import app as fastapi_app
import registry as project_registry
from core.memory import memory_insert, update_stats
from core.models import Candidate, Memory, Observation
from llm.models import LlmEndpointConfig
from oracles.models import NoiseKind, SyntheticEnvConfig

TEST_API_KEY = "sk-test-0123456789abcdef"
TEST_KEY_ENV = "LLM_TEST_API_KEY"


@pytest.fixture
def deterministic_env():
    return SyntheticEnvConfig(reward_cap=1.0, gamma=0.2, delta0=1.0, sigma=0.0, noise=NoiseKind.NONE, embedding_dim=8)


@pytest.fixture
def make_memory():
    """Build a memory from {candidate_id: [rewards]}; entries get created_at in insertion order."""

    def _make(rewards_by_id: dict[str, list[float]], embeddings: dict[str, tuple[float, ...]] | None = None) -> Memory:
        memory = Memory()
        for created_at, (candidate_id, rewards) in enumerate(rewards_by_id.items()):
            embedding = (embeddings or {}).get(candidate_id)
            memory_insert(memory, Candidate(id=candidate_id, payload=candidate_id, embedding=embedding, created_at=created_at))
            update_stats(
                memory,
                [
                    Observation(candidate_id=candidate_id, task_id=f"t{i}", reward=r, iteration=created_at)
                    for i, r in enumerate(rewards)
                ],
            )
        return memory

    return _make


@pytest.fixture
def fresh_registry():
    return project_registry.RunRegistry()


@pytest.fixture
async def async_client(fresh_registry):
    # Each test gets its own registry instead of the process-wide one
    async def override_get_registry():
        yield fresh_registry

    fastapi_app.dependency_overrides[project_registry.get_registry] = override_get_registry

    async with AsyncClient(transport=ASGITransport(app=fastapi_app), base_url="http://testserver") as ac:
        yield ac

    # Clean up
    fastapi_app.dependency_overrides.clear()


class ScriptedLlm:
    """Chat/embedding server answering from queued (status, content) pairs."""

    def __init__(self):
        self.chat_script: list[tuple[int, str]] = []
        self.embed_script: list[tuple[int, list[float]]] = []
        self.default_chat = "ok"
        self.default_vector = [0.1, 0.2]
        self.chat_calls: list[dict] = []
        self.embed_calls: list[dict] = []
        self.app = self._build_app()

    def _build_app(self) -> FastAPI:
        app = FastAPI()

        @app.post("/v1/chat/completions")
        async def chat(request: Request):
            self.chat_calls.append({"body": await request.json(), "headers": dict(request.headers)})
            status, content = self.chat_script.pop(0) if self.chat_script else (200, self.default_chat)
            if status != 200:
                return JSONResponse({"error": {"message": "scripted failure"}}, status_code=status)
            return {"choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]}

        @app.post("/v1/embeddings")
        async def embeddings(request: Request):
            self.embed_calls.append({"body": await request.json(), "headers": dict(request.headers)})
            status, vector = self.embed_script.pop(0) if self.embed_script else (200, self.default_vector)
            if status != 200:
                return JSONResponse({"error": {"message": "scripted failure"}}, status_code=status)
            return {"data": [{"index": 0, "embedding": vector}]}

        return app


@pytest.fixture
def scripted_llm():
    return ScriptedLlm()


@pytest.fixture
async def llm_http_client(scripted_llm):
    async with httpx.AsyncClient(transport=ASGITransport(app=scripted_llm.app), base_url="http://mock") as client:
        yield client


@pytest.fixture
def llm_endpoint(monkeypatch):
    monkeypatch.setenv(TEST_KEY_ENV, TEST_API_KEY)
    return LlmEndpointConfig(
        base_url="http://mock/v1",
        model="mock-model",
        api_key_env=TEST_KEY_ENV,
        max_retries=2,
        backoff_factor_s=0.0,
    )

# llm/client.py
"""Chat-completion and embedding client over httpx.

Transient failures (timeouts, connection errors, 408/409/425/429 and 5xx)
are retried with exponential backoff up to ``max_retries`` times; every
other error status fails at once.
"""
import logging
import os
from collections.abc import Sequence

import backoff
import httpx
from pydantic import BaseModel, ValidationError

from .errors import DimensionDriftError, EmptyInputError, LlmConfigError, LlmParseError, LlmTransportError
from .models import (
    ChatCompletionRequest,
    ChatCompletionResponse,
    ChatMessage,
    EmbeddingRequest,
    EmbeddingResponse,
    LlmEndpointConfig,
)

logger = logging.getLogger(__name__)

TRANSIENT_STATUSES = frozenset({408, 409, 425, 429})
EXCERPT_CHARS = 300


class _TransientError(Exception):
    def __init__(self, status_code: int | None, excerpt: str):
        super().__init__(f"transient failure ({status_code or 'transport'}): {excerpt}")
        self.status_code = status_code
        self.excerpt = excerpt


def redact(text: str, secret: str | None) -> str:
    if secret:
        text = text.replace(secret, "***")
    return text


def is_transient(status_code: int) -> bool:
    return status_code in TRANSIENT_STATUSES or status_code >= 500


class LlmClient:
    def __init__(self, endpoint: LlmEndpointConfig, http_client: httpx.AsyncClient | None = None):
        self.endpoint = endpoint
        self._http = http_client
        self._dimension: int | None = None

    @property
    def dimension(self) -> int | None:
        return self._dimension

    def _api_key(self) -> str:
        key = os.environ.get(self.endpoint.api_key_env)
        if not key:
            raise LlmConfigError(f"environment variable {self.endpoint.api_key_env} is not set")
        return key

    async def _post(self, path: str, body: BaseModel) -> dict:
        key = self._api_key()
        url = self.endpoint.url(path)
        headers = {"Authorization": f"Bearer {key}"}
        timeout = self.endpoint.timeout_ms / 1000

        async def _send(client: httpx.AsyncClient) -> dict:
            logger.debug("POST %s %s", url, redact(body.model_dump_json(), key))
            try:
                response = await client.post(url, json=body.model_dump(mode="json"), headers=headers, timeout=timeout)
            except httpx.TransportError as exc:
                raise _TransientError(None, redact(str(exc), key)) from exc

            excerpt = redact(response.text[:EXCERPT_CHARS], key)
            logger.debug("%s -> %d %s", url, response.status_code, excerpt)
            if response.status_code >= 400:
                if is_transient(response.status_code):
                    raise _TransientError(response.status_code, excerpt)
                raise LlmTransportError(
                    f"{url} returned HTTP {response.status_code}: {excerpt}",
                    status_code=response.status_code,
                    body_excerpt=excerpt,
                )
            try:
                return response.json()
            except ValueError as exc:
                raise LlmParseError(f"{url} returned a non-JSON body: {excerpt}") from exc

        send = backoff.on_exception(
            backoff.expo,
            _TransientError,
            max_tries=self.endpoint.max_retries + 1,
            factor=self.endpoint.backoff_factor_s,
            jitter=None,
            logger=None,
        )(_send)

        try:
            if self._http is not None:
                return await send(self._http)
            async with httpx.AsyncClient() as client:
                return await send(client)
        except _TransientError as exc:
            raise LlmTransportError(
                f"{url} failed after {self.endpoint.max_retries + 1} attempts: {exc}",
                status_code=exc.status_code,
                body_excerpt=exc.excerpt,
            ) from None

    async def chat_complete(self, messages: Sequence[ChatMessage]) -> str:
        request = ChatCompletionRequest(
            model=self.endpoint.model,
            messages=list(messages),
            temperature=self.endpoint.temperature,
        )
        raw = await self._post("chat/completions", request)
        try:
            response = ChatCompletionResponse.model_validate(raw)
        except ValidationError as exc:
            raise LlmParseError(f"malformed chat completion: {exc.error_count()} validation errors") from exc
        if not response.choices:
            raise LlmParseError("chat completion has no choices")
        return response.choices[0].message.content

    async def embed(self, text: str) -> tuple[float, ...]:
        if not text.strip():
            raise EmptyInputError("cannot embed empty text")
        raw = await self._post("embeddings", EmbeddingRequest(model=self.endpoint.model, input=text))
        try:
            response = EmbeddingResponse.model_validate(raw)
        except ValidationError as exc:
            raise LlmParseError(f"malformed embedding response: {exc.error_count()} validation errors") from exc
        if not response.data or not response.data[0].embedding:
            raise LlmParseError("embedding response carries no vector")

        vector = tuple(response.data[0].embedding)
        if self._dimension is None:
            self._dimension = len(vector)
        elif len(vector) != self._dimension:
            raise DimensionDriftError(f"embedding dimension changed from {self._dimension} to {len(vector)}")
        return vector


async def chat_complete(
    endpoint: LlmEndpointConfig,
    messages: Sequence[ChatMessage],
    http_client: httpx.AsyncClient | None = None,
) -> str:
    return await LlmClient(endpoint, http_client).chat_complete(messages)


async def embed(endpoint: LlmEndpointConfig, text: str, http_client: httpx.AsyncClient | None = None) -> tuple[float, ...]:
    return await LlmClient(endpoint, http_client).embed(text)

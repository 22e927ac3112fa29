# llm/models.py
from typing import Literal, Self

from pydantic import AnyHttpUrl, BaseModel, ConfigDict, Field, model_validator


class LlmEndpointConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    base_url: AnyHttpUrl = AnyHttpUrl("https://api.openai.com/v1")
    model: str = Field("gpt-4o-mini", min_length=1)
    api_key_env: str = Field("OPENAI_API_KEY", min_length=1, description="Name of the variable holding the key")
    timeout_ms: int = Field(60_000, gt=0)
    max_retries: int = Field(2, ge=0)
    temperature: float = 0.7
    backoff_factor_s: float = Field(0.5, ge=0.0, description="First retry delay; doubles per attempt")

    def url(self, path: str) -> str:
        return f"{str(self.base_url).rstrip('/')}/{path.lstrip('/')}"


class ChatMessage(BaseModel):
    role: Literal["system", "user", "assistant"]
    content: str

    @model_validator(mode="after")
    def _content_required(self) -> Self:
        if self.role != "assistant" and not self.content.strip():
            raise ValueError(f"{self.role} message content must not be empty")
        return self


class ChatCompletionRequest(BaseModel):
    model: str
    messages: list[ChatMessage]
    temperature: float


class ChatChoice(BaseModel):
    index: int = 0
    message: ChatMessage


class ChatCompletionResponse(BaseModel):
    choices: list[ChatChoice]


class EmbeddingRequest(BaseModel):
    model: str
    input: str


class EmbeddingItem(BaseModel):
    index: int = 0
    embedding: list[float]


class EmbeddingResponse(BaseModel):
    data: list[EmbeddingItem]

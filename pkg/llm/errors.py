# llm/errors.py
from core.errors import PolcaError


class LlmError(PolcaError):
    pass


class LlmConfigError(LlmError):
    pass


class LlmTransportError(LlmError):
    def __init__(self, message: str, status_code: int | None = None, body_excerpt: str = ""):
        super().__init__(message)
        self.status_code = status_code
        self.body_excerpt = body_excerpt


class LlmParseError(LlmError):
    pass


class DimensionDriftError(LlmError):
    pass


class EmptyInputError(LlmError):
    pass

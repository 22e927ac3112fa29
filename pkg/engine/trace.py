# engine/trace.py
from collections.abc import Callable
from enum import StrEnum
from typing import Any

from pydantic import BaseModel, Field


class TraceKind(StrEnum):
    ITERATION_START = "iteration_start"
    EVALUATION = "evaluation"
    PROPOSAL = "proposal"
    FILTER_DECISION = "filter_decision"
    MEMORY_UPDATE = "memory_update"
    SUMMARY = "summary"
    RUN_END = "run_end"


class TraceEvent(BaseModel):
    seq: int = Field(..., ge=0)
    iteration: int = Field(..., ge=0)
    kind: TraceKind
    payload: dict[str, Any] = Field(default_factory=dict)


class TraceRecorder:
    """Append-only event log; optionally forwards every event to a listener as it is recorded."""

    def __init__(self, listener: Callable[[TraceEvent], None] | None = None):
        self.events: list[TraceEvent] = []
        self._listener = listener

    def record(self, iteration: int, kind: TraceKind, **payload: Any) -> TraceEvent:
        event = TraceEvent(seq=len(self.events), iteration=iteration, kind=kind, payload=payload)
        self.events.append(event)
        if self._listener is not None:
            self._listener(event)
        return event

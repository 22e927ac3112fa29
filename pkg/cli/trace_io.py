# cli/trace_io.py
"""JSONL trace files: one header line, then one event per line."""
from collections.abc import Iterable, Sequence
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, TextIO

from pydantic import BaseModel, Field, ValidationError

from engine.trace import TraceEvent
from .errors import TraceFormatError, TraceWriteError

TRACE_FORMAT = "polca.trace"
TRACE_VERSION = 1


class TraceHeader(BaseModel):
    format: str = TRACE_FORMAT
    version: int = TRACE_VERSION
    run_id: str
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    config: dict[str, Any] = Field(default_factory=dict)


def _write_line(sink: TextIO, line: str) -> None:
    try:
        sink.write(line + "\n")
        sink.flush()
    except OSError as exc:
        raise TraceWriteError(f"could not write trace: {exc}") from exc


def emit_trace(events: Iterable[TraceEvent], sink: TextIO, header: TraceHeader) -> None:
    _write_line(sink, header.model_dump_json())
    last = -1
    for event in events:
        if event.seq <= last:
            raise TraceFormatError(f"event seq {event.seq} is not after {last}")
        last = event.seq
        _write_line(sink, event.model_dump_json())


class JsonlTraceWriter:
    """Streams events to a file as the engine records them.

    Every line is flushed, so a failed run leaves its partial trace behind.
    """

    def __init__(self, path: Path, header: TraceHeader):
        self.path = path
        try:
            self._file = path.open("w", encoding="utf-8", newline="\n")
        except OSError as exc:
            raise TraceWriteError(f"could not open trace file {path}: {exc}") from exc
        _write_line(self._file, header.model_dump_json())

    def write(self, event: TraceEvent) -> None:
        _write_line(self._file, event.model_dump_json())

    def close(self) -> None:
        self._file.close()

    def __enter__(self) -> "JsonlTraceWriter":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def parse_trace(lines: Sequence[str]) -> tuple[TraceHeader, list[TraceEvent]]:
    lines = [line for line in lines if line.strip()]
    if not lines:
        raise TraceFormatError("trace is empty")
    try:
        header = TraceHeader.model_validate_json(lines[0])
    except ValidationError as exc:
        raise TraceFormatError("first trace line is not a trace header") from exc
    if header.format != TRACE_FORMAT or header.version > TRACE_VERSION:
        raise TraceFormatError(f"unsupported trace format {header.format} v{header.version}")

    events = []
    for number, line in enumerate(lines[1:], start=2):
        try:
            events.append(TraceEvent.model_validate_json(line))
        except ValidationError as exc:
            raise TraceFormatError(f"trace line {number} is not a valid event") from exc
    return header, events


def read_trace(path: Path) -> tuple[TraceHeader, list[TraceEvent]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TraceFormatError(f"cannot read trace {path}: {exc}") from exc
    return parse_trace(text.splitlines())

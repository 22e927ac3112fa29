# registry.py
from collections.abc import AsyncGenerator
from dataclasses import dataclass, field
from datetime import datetime, timezone

from engine.models import RunResult


@dataclass
class StoredRun:
    result: RunResult
    created_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))


class RunRegistry:
    """In-process store of finished runs, keyed by run id."""

    def __init__(self) -> None:
        self._runs: dict[str, StoredRun] = {}

    def add(self, result: RunResult) -> StoredRun:
        stored = StoredRun(result=result)
        self._runs[result.run_id] = stored
        return stored

    def get(self, run_id: str) -> StoredRun | None:
        return self._runs.get(run_id)

    def list(self) -> list[StoredRun]:
        return sorted(self._runs.values(), key=lambda r: r.created_at, reverse=True)

    def clear(self) -> None:
        self._runs.clear()


_registry = RunRegistry()


# ---------- FastAPI dependency ----------

async def get_registry() -> AsyncGenerator[RunRegistry, None]:
    """Provide the process-wide run registry."""
    yield _registry

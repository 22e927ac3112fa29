# api/runs/views.py
from fastapi import APIRouter, Depends, HTTPException, status

from cli.metrics import MetricsRow
from registry import RunRegistry, get_registry
from .models import RunCreate, RunRead
from . import run_manager

router = APIRouter(prefix="/runs", tags=["runs"])


@router.post(
    "",
    response_model=RunRead,
    status_code=status.HTTP_201_CREATED,
    summary="Run a synthetic search",
)
async def create_run_endpoint(
    payload: RunCreate,
    registry: RunRegistry = Depends(get_registry),
) -> RunRead:
    """
    Run the search loop against the synthetic oracles and store the result.
    """
    try:
        stored = await run_manager.create_run(registry, payload)
    except run_manager.RunRejectedError as exc:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(exc),
        ) from exc

    return run_manager.to_read(stored)


@router.get(
    "",
    response_model=list[RunRead],
    summary="List runs",
)
async def list_runs_endpoint(
    registry: RunRegistry = Depends(get_registry),
) -> list[RunRead]:
    """
    List finished runs, newest first.
    """
    return [run_manager.to_read(stored) for stored in registry.list()]


@router.get(
    "/{run_id}",
    response_model=RunRead,
    summary="Get one run",
)
async def get_run_endpoint(
    run_id: str,
    registry: RunRegistry = Depends(get_registry),
) -> RunRead:
    try:
        stored = run_manager.get_run(registry, run_id)
    except run_manager.RunNotFoundError as exc:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(exc)) from exc
    return run_manager.to_read(stored)


@router.get(
    "/{run_id}/metrics",
    response_model=list[MetricsRow],
    summary="Best-score curves of a run",
)
async def run_metrics_endpoint(
    run_id: str,
    registry: RunRegistry = Depends(get_registry),
) -> list[MetricsRow]:
    """
    Best score so far against evaluation steps, metric calls, proposal steps and proposals.
    """
    try:
        return run_manager.run_metrics(registry, run_id)
    except run_manager.RunNotFoundError as exc:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(exc)) from exc

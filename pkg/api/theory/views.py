# api/theory/views.py
from fastapi import APIRouter, HTTPException, status

from theory.errors import NonConvergenceError
from .models import HittingTimeRequest, HittingTimeResponse
from . import theory_manager

router = APIRouter(prefix="/theory", tags=["theory"])


@router.post(
    "/hitting-times",
    response_model=HittingTimeResponse,
    summary="Simulate hitting times of sequential and POLCA updating",
)
async def hitting_times_endpoint(payload: HittingTimeRequest) -> HittingTimeResponse:
    try:
        rows = theory_manager.hitting_time_rows(payload)
    except NonConvergenceError as exc:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(exc),
        ) from exc
    return HittingTimeResponse(rows=rows)

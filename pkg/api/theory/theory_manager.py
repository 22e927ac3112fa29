# api/theory/theory_manager.py
from core.rng import derive_rng
from oracles.models import NoiseKind, SyntheticEnvConfig
from theory.errors import NonConvergenceError
from theory.hitting_times import analytic_hitting_time, hitting_time_report
from theory.models import HittingTimeReport, UpdateRule
from .models import HittingTimeRequest

# requests whose expected hitting time is beyond this are refused up front
MAX_EXPECTED_STEPS = 100_000


def hitting_time_rows(request: HittingTimeRequest) -> list[HittingTimeReport]:
    """Analytic against simulated hitting times for both updating rules."""
    env = SyntheticEnvConfig(
        reward_cap=1.0,
        gamma=1.0 / request.levels,
        delta0=request.delta0,
        noise=NoiseKind.NONE,
        failure_mode=request.failure_mode,
    )
    for rule in UpdateRule:
        expected = analytic_hitting_time(env, rule)
        if expected is not None and expected > MAX_EXPECTED_STEPS:
            raise NonConvergenceError(
                f"{rule.value} updating needs about {expected:.3g} steps on average; "
                f"requests are limited to {MAX_EXPECTED_STEPS}"
            )
    return [
        hitting_time_report(env, rule, request.replicates, derive_rng(request.seed, "hitting", rule.value))
        for rule in UpdateRule
    ]

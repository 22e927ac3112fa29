# theory/hitting_times.py
"""Steps until a proposal's true mean exceeds B - gamma.

Means are tracked in units of gamma and every success moves exactly one
unit, the smallest improvement the strict-improvement assumption allows.
Sequential updating proposes from the latest program; POLCA proposes from
the best program seen so far.
"""
import math
from fractions import Fraction

import numpy as np

from oracles.models import FailureMode, SyntheticEnvConfig
from .errors import NonConvergenceError
from .models import HittingTimeReport, UpdateRule

STEP_CAP = 10_000_000


def _gamma_ratio(env: SyntheticEnvConfig) -> Fraction:
    return Fraction(str(env.reward_cap)) / Fraction(str(env.gamma))


def level_count(env: SyntheticEnvConfig) -> int:
    """Number of consecutive one-gamma successes needed from a zero mean."""
    return math.floor(_gamma_ratio(env) - 1) + 1


def simulate_hitting_times(
    env: SyntheticEnvConfig,
    rule: UpdateRule,
    replicates: int,
    rng: np.random.Generator,
    *,
    step_cap: int = STEP_CAP,
) -> np.ndarray:
    """Hitting times of ``replicates`` independent chains, vectorised.

    Coin flips and failure draws use separate streams, so the coin sequence
    is the same whatever the failure mode.
    """
    coin_rng, failure_rng = (np.random.default_rng(s) for s in rng.integers(0, 2**63, size=2))
    ratio = _gamma_ratio(env)
    threshold = float(ratio - 1)
    top = float(ratio)

    position = np.zeros(replicates)
    times = np.zeros(replicates, dtype=np.int64)
    active = np.arange(replicates)
    step = 0

    while active.size:
        step += 1
        if step > step_cap:
            raise NonConvergenceError(f"{active.size} of {replicates} chains still running after {step_cap} steps")

        current = position[active]
        success = coin_rng.random(active.size) < env.delta0
        improved = np.minimum(current + 1.0, top)

        if rule is UpdateRule.POLCA or env.failure_mode is FailureMode.STAY:
            # a failed proposal never beats the historical best, so POLCA keeps it
            failed = current
        elif env.failure_mode is FailureMode.RESTART:
            failed = np.zeros_like(current)
        else:
            failed = failure_rng.random(active.size) * current

        current = np.where(success, improved, failed)
        position[active] = current

        hit = current > threshold
        times[active[hit]] = step
        active = active[~hit]

    return times


def hitting_time_sequential(env: SyntheticEnvConfig, rng: np.random.Generator) -> int:
    return int(simulate_hitting_times(env, UpdateRule.SEQUENTIAL, 1, rng)[0])


def hitting_time_polca(env: SyntheticEnvConfig, rng: np.random.Generator) -> int:
    return int(simulate_hitting_times(env, UpdateRule.POLCA, 1, rng)[0])


def expected_sequential(delta0: float, levels: int) -> float:
    """Mean steps to see ``levels`` consecutive successes (restart on failure)."""
    if delta0 == 1:
        return float(levels)
    return (delta0**-levels - 1) / (1 - delta0)


def expected_polca(delta0: float, levels: int) -> float:
    return levels / delta0


def analytic_hitting_time(env: SyntheticEnvConfig, rule: UpdateRule) -> float | None:
    levels = level_count(env)
    if rule is UpdateRule.POLCA or env.failure_mode is FailureMode.STAY:
        return expected_polca(env.delta0, levels)
    if env.failure_mode is FailureMode.RESTART:
        return expected_sequential(env.delta0, levels)
    return None


def hitting_time_report(
    env: SyntheticEnvConfig,
    rule: UpdateRule,
    replicates: int,
    rng: np.random.Generator,
    tolerance_se: float = 3.0,
) -> HittingTimeReport:
    times = simulate_hitting_times(env, rule, replicates, rng)
    mean = float(times.mean())
    stderr = float(times.std(ddof=1) / math.sqrt(replicates)) if replicates > 1 else 0.0
    analytic = analytic_hitting_time(env, rule)

    passed = None
    if analytic is not None:
        passed = abs(mean - analytic) <= tolerance_se * stderr + 1e-9
    return HittingTimeReport(
        rule=rule,
        delta0=env.delta0,
        levels=level_count(env),
        replicates=replicates,
        analytic=analytic,
        empirical_mean=mean,
        stderr=stderr,
        passed=passed,
    )

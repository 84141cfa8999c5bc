"""Recruitment models and expected pipeline-participant counts.

Two accrual patterns are modelled over a recruitment period of t_max months:

* uniform: a constant rate lambda = n_max / t_max;
* mixed: a monthly intake rising linearly (delta * t in month t) until a
  fraction l of the period has elapsed, then flat at delta * l * t_max.
  l = 1 is a fully linear ramp.

Time is treated as discrete months, but all month sums are evaluated in
closed form with real-valued stage times, so no quantity is forced to an
integer. Pipeline participants at an interim are the expected recruits
during the outcome-delay window of length m that follows the interim's
recruitment time, capped so the trial never exceeds n_max.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import ConfigError

if TYPE_CHECKING:
    from .design import GroupSequentialDesign

__all__ = [
    "RecruitmentModel",
    "PipelineProfile",
    "solve_delta",
    "recruit_time",
    "pipeline_counts",
]


@dataclass(frozen=True)
class RecruitmentModel:
    """Accrual pattern over a fixed recruitment period.

    Attributes:
        pattern: "uniform" or "mixed".
        t_max: total recruitment period in months.
        ramp_fraction: fraction l of the period with a rising rate
            (mixed only; 1.0 means linear throughout).
    """

    pattern: str
    t_max: float
    ramp_fraction: float = 1.0

    def __post_init__(self):
        if self.pattern not in ("uniform", "mixed"):
            raise ConfigError(f"unknown recruitment pattern {self.pattern!r}")
        if self.t_max <= 0:
            raise ConfigError("t_max must be positive")
        if self.pattern == "mixed" and not 0.0 < self.ramp_fraction <= 1.0:
            raise ConfigError("the ramp fraction l must lie in (0, 1]")

    @classmethod
    def uniform(cls, t_max: float) -> "RecruitmentModel":
        return cls("uniform", t_max)

    @classmethod
    def mixed(cls, t_max: float, ramp_fraction: float) -> "RecruitmentModel":
        return cls("mixed", t_max, ramp_fraction)

    @classmethod
    def linear(cls, t_max: float) -> "RecruitmentModel":
        return cls("mixed", t_max, 1.0)


@dataclass(frozen=True)
class PipelineProfile:
    """Expected pipeline participants and recruitment times per stage."""

    pipeline: tuple[float, ...]
    recruit_times: tuple[float, ...]


def solve_delta(n_max: float, t_max: float, ramp_fraction: float) -> float:
    """Rate slope of the mixed model so the period recruits exactly n_max.

    The ramp contributes delta * (1 + 2 + ... + l*t_max) and the flat phase
    delta * l * t_max * (1 - l) * t_max; their sum is set equal to n_max.
    """
    if n_max <= 0 or t_max <= 0 or not 0.0 < ramp_fraction <= 1.0:
        raise ConfigError("need n_max > 0, t_max > 0 and l in (0, 1]")
    ramp_end = ramp_fraction * t_max
    if ramp_end < 1.0:
        warnings.warn(
            f"ramp phase shorter than one month (l*t_max = {ramp_end:.3g})", stacklevel=2
        )
    total = 0.5 * ramp_end * (ramp_end + 1.0) + ramp_end * (1.0 - ramp_fraction) * t_max
    return n_max / total


def recruit_time(n: float, n_max: float, model: RecruitmentModel) -> float:
    """Expected months needed to recruit the first n participants."""
    if not 0.0 <= n <= n_max * (1.0 + 1e-12):
        raise ConfigError(f"n must lie in [0, n_max], got {n}")
    if model.pattern == "uniform":
        return n * model.t_max / n_max
    delta = solve_delta(n_max, model.t_max, model.ramp_fraction)
    ramp_end = model.ramp_fraction * model.t_max
    ramp_capacity = 0.5 * delta * ramp_end * (ramp_end + 1.0)
    if n <= ramp_capacity:
        return (-1.0 + (1.0 + 8.0 * n / delta) ** 0.5) / 2.0
    return ramp_end + (n - ramp_capacity) / (delta * ramp_end)


def _mixed_window(t_k: float, m: float, delta: float, ramp_end: float) -> float:
    """Expected recruits in the m months after time t_k under the mixed model."""
    if t_k >= ramp_end:
        # interim falls in the flat phase
        return delta * ramp_end * m
    if t_k + m < ramp_end:
        # the whole window stays on the ramp: sum of delta*(t_k+j), j=1..m
        return delta * m * t_k + delta * m * (m + 1.0) / 2.0
    # window straddles the ramp end: finish the ramp, then flat
    ramp_part = (ramp_end - t_k) * (t_k + 1.0 + ramp_end) / 2.0
    flat_part = ramp_end * (t_k + m - ramp_end)
    return delta * (ramp_part + flat_part)


def pipeline_counts(
    design: "GroupSequentialDesign", model: RecruitmentModel, m: float
) -> PipelineProfile:
    """Expected pipeline participants at each analysis for delay length m.

    Counts are capped at n_max - n_k (recruitment stops at n_max) and the
    final analysis has none by construction.
    """
    if m < 0:
        raise ConfigError("the delay length m must be non-negative")
    n_max = design.max_n
    stage_n = design.stage_n
    K = len(stage_n)
    times = tuple(recruit_time(n, n_max, model) for n in stage_n)

    if model.pattern == "uniform":
        rate = n_max / model.t_max
        raw = [rate * m] * K
    else:
        delta = solve_delta(n_max, model.t_max, model.ramp_fraction)
        ramp_end = model.ramp_fraction * model.t_max
        raw = [_mixed_window(t, m, delta, ramp_end) for t in times]

    pipeline = [min(raw[k], n_max - stage_n[k]) for k in range(K)]
    pipeline[K - 1] = 0.0
    return PipelineProfile(tuple(pipeline), times)

"""Construction of a powered group-sequential design.

A design is found by first building the stopping boundaries at the requested
one-sided level (they depend only on K, the information fractions and the
futility style) and then inflating the maximum sample size until the test
attains the requested power at the target effect. Sample sizes stay
continuous throughout; rounding to whole participants happens only in
``round_for_report``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .boundaries import (
    BoundaryFamily,
    BoundarySet,
    FutilityStyle,
    WangTsiatis,
    build_boundaries,
)
from .errors import ConfigError, SolveError
from .sequential import (
    DEFAULT_NODES,
    ExitProbabilities,
    SequentialProblem,
    exit_probabilities,
    normal_quantile,
)

__all__ = [
    "DesignSpec",
    "GroupSequentialDesign",
    "single_stage_n",
    "build_design",
    "efficiency_gain",
    "round_for_report",
]

# Power search gives up beyond this multiple of the single-stage size.
_MAX_INFLATION = 50.0


@dataclass(frozen=True)
class DesignSpec:
    """User-chosen design parameters.

    Attributes:
        alpha: one-sided type I error level.
        beta: type II error level; the design is powered at 1 - beta.
        tau: standardized target effect used for powering.
        num_stages: number of planned analyses K.
        family: boundary family (defaults to Wang-Tsiatis with shape 0.25).
        futility: futility style, binding throughout.
        mu_eval: effect at which operating characteristics are evaluated
            (defaults to tau).
        sigma0_sq / sigma1_sq: known outcome variances per arm.
        info_fractions: information fractions rho_k, defaulting to k/K.
        allocation: experimental-to-control allocation ratio.
    """

    alpha: float
    beta: float
    tau: float
    num_stages: int
    family: BoundaryFamily = field(default_factory=lambda: WangTsiatis(0.25))
    futility: FutilityStyle = FutilityStyle.BINDING_ZERO
    mu_eval: float | None = None
    sigma0_sq: float = 1.0
    sigma1_sq: float = 1.0
    info_fractions: tuple[float, ...] | None = None
    allocation: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise ConfigError("alpha must lie in (0, 0.5)")
        if not 0.0 < self.beta < 1.0:
            raise ConfigError("beta must lie in (0, 1)")
        if self.tau <= 0:
            raise ConfigError("the target effect tau must be positive")
        if self.num_stages < 1:
            raise ConfigError("at least one stage is required")
        if self.sigma0_sq <= 0 or self.sigma1_sq <= 0:
            raise ConfigError("variances must be positive")
        if self.allocation <= 0:
            raise ConfigError("allocation ratio must be positive")
        if self.info_fractions is not None:
            rho = np.asarray(self.info_fractions, dtype=float)
            if len(rho) != self.num_stages:
                raise ConfigError("info_fractions must have one entry per stage")
            if rho[0] <= 0 or np.any(np.diff(rho) <= 0) or abs(rho[-1] - 1.0) > 1e-12:
                raise ConfigError("info_fractions must increase strictly to 1")

    @property
    def fractions(self) -> tuple[float, ...]:
        if self.info_fractions is not None:
            return tuple(float(r) for r in self.info_fractions)
        K = self.num_stages
        return tuple((k + 1) / K for k in range(K))

    @property
    def evaluation_effect(self) -> float:
        return self.tau if self.mu_eval is None else self.mu_eval

    def information_for_total(self, n: float) -> float:
        """Fisher information of the treatment-difference estimate at total size n."""
        r = self.allocation
        return n / ((1.0 + r) * (self.sigma0_sq + self.sigma1_sq / r))


@dataclass(frozen=True)
class GroupSequentialDesign:
    """A concrete design: boundaries, stage sizes and operating characteristics."""

    spec: DesignSpec
    boundaries: BoundarySet
    n_single: float
    max_n: float
    stage_n: tuple[float, ...]
    control_n: tuple[float, ...]
    experimental_n: tuple[float, ...]
    info_levels: tuple[float, ...]
    exit: ExitProbabilities
    ess: float
    eg: float

    @property
    def num_stages(self) -> int:
        return self.spec.num_stages

    def exit_at(self, mu: float, nodes: int = DEFAULT_NODES) -> ExitProbabilities:
        """Exit probabilities under an arbitrary effect."""
        problem = SequentialProblem(
            self.info_levels, mu, self.boundaries.efficacy, self.boundaries.futility
        )
        return exit_probabilities(problem, nodes=nodes)


def single_stage_n(
    alpha: float,
    beta: float,
    tau: float,
    sigma0_sq: float = 1.0,
    sigma1_sq: float = 1.0,
    allocation: float = 1.0,
) -> float:
    """Total sample size of the single-look z-test (continuous, not rounded).

    With equal allocation this is 2(s0^2+s1^2)(z_{1-alpha}+z_{1-beta})^2/tau^2.
    """
    if tau <= 0:
        raise ConfigError("the target effect tau must be positive")
    z = normal_quantile(1.0 - alpha) + normal_quantile(1.0 - beta)
    r = allocation
    return (1.0 + r) * (sigma0_sq + sigma1_sq / r) * (z / tau) ** 2


def build_design(spec: DesignSpec, nodes: int = DEFAULT_NODES) -> GroupSequentialDesign:
    """Build the design described by ``spec``.

    The maximum sample size is found by root search so that the rejection
    probability at the target effect equals 1 - beta (within 1e-6 or better);
    rejection is monotone in the maximum size, so the bracket is expanded
    geometrically until it straddles the target.

    Raises:
        SolveError: if the power is unattainable below 50x the single-stage size.
    """
    K = spec.num_stages
    rho = np.asarray(spec.fractions)
    bounds = build_boundaries(spec.family, K, rho, spec.alpha, spec.futility, nodes)
    n_ref = single_stage_n(
        spec.alpha, spec.beta, spec.tau, spec.sigma0_sq, spec.sigma1_sq, spec.allocation
    )

    def power_gap(total_n: float) -> float:
        info = tuple(rho * spec.information_for_total(total_n))
        problem = SequentialProblem(info, spec.tau, bounds.efficacy, bounds.futility)
        return exit_probabilities(problem, nodes=nodes).total_reject - (1.0 - spec.beta)

    lo, hi = 0.5 * n_ref, 3.0 * n_ref
    while power_gap(lo) > 0 and lo > 1e-9 * n_ref:
        lo /= 4.0
    if power_gap(lo) > 0:
        # rejection tends to the attained level as information vanishes, so the
        # requested power sits below the design's floor
        raise SolveError(f"power {1 - spec.beta} is below the attainable floor of this design")
    while power_gap(hi) < 0:
        hi *= 2.0
        if hi > _MAX_INFLATION * n_ref:
            raise SolveError(
                f"power {1 - spec.beta} unattainable below {_MAX_INFLATION}x the single-stage size"
            )
    max_n = float(brentq(power_gap, lo, hi, xtol=1e-9))

    stage_n = rho * max_n
    r = spec.allocation
    control_n = stage_n / (1.0 + r)
    experimental_n = stage_n * r / (1.0 + r)
    info_levels = tuple(rho * spec.information_for_total(max_n))

    problem = SequentialProblem(info_levels, spec.evaluation_effect, bounds.efficacy, bounds.futility)
    exit = exit_probabilities(problem, nodes=nodes)
    ess = float(np.dot(exit.stop_per_stage, stage_n))
    return GroupSequentialDesign(
        spec=spec,
        boundaries=bounds,
        n_single=n_ref,
        max_n=max_n,
        stage_n=tuple(stage_n),
        control_n=tuple(control_n),
        experimental_n=tuple(experimental_n),
        info_levels=info_levels,
        exit=exit,
        ess=ess,
        eg=(n_ref - ess) / n_ref,
    )


def efficiency_gain(design: GroupSequentialDesign) -> float:
    """Relative expected-sample-size saving over the single-stage design."""
    return (design.n_single - design.ess) / design.n_single


def round_for_report(design: GroupSequentialDesign, granularity: int = 1) -> tuple[int, ...]:
    """Cumulative stage sizes rounded up to whole participants.

    Each cumulative total is rounded up to the next multiple of
    ``granularity``; already-integral totals pass through unchanged and the
    result is non-decreasing across stages.
    """
    if granularity < 1:
        raise ConfigError("granularity must be a positive integer")
    rounded = [int(math.ceil(n / granularity - 1e-12)) * granularity for n in design.stage_n]
    for k in range(1, len(rounded)):
        rounded[k] = max(rounded[k], rounded[k - 1])
    return tuple(rounded)

"""Efficacy/futility stopping boundaries.

Two families are supported:

* the Wang-Tsiatis power family e_k = C * rho_k^(shape - 1/2), which contains
  Pocock (shape 0.5, constant bound) and O'Brien-Fleming (shape 0) as special
  cases; the constant C is solved so the overall one-sided type I error under
  zero drift equals alpha, with the futility bounds treated as binding;
* error-spending boundaries from the Hwang-Shih-DeCani spending function,
  solved stage by stage so the cumulative rejection probability at analysis k
  equals the spent error at information fraction rho_k.

Futility handling is one of: a binding bound at zero before the last stage,
a mirrored (symmetric) bound f_k = -e_k, or no early acceptance at all.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, SolveError
from .sequential import DEFAULT_NODES, SequentialProblem, exit_probabilities

__all__ = [
    "WangTsiatis",
    "HwangShihDeCani",
    "BoundaryFamily",
    "FutilityStyle",
    "BoundarySet",
    "wt_boundaries",
    "hsd_spend",
    "spending_boundaries",
    "build_boundaries",
]

# Bracket for the Wang-Tsiatis constant C (configuration error if the root
# escapes it) and for each stage-wise spending solve.
_WT_BRACKET = (0.1, 10.0)
_SPEND_BRACKET = (-4.0, 12.0)


@dataclass(frozen=True)
class WangTsiatis:
    """Power-family shape; 0 is O'Brien-Fleming, 0.5 is Pocock."""

    shape: float

    def __post_init__(self):
        if not math.isfinite(self.shape):
            raise ConfigError("Wang-Tsiatis shape must be finite")


@dataclass(frozen=True)
class HwangShihDeCani:
    """Error-spending family indexed by the spending parameter gamma."""

    gamma: float

    def __post_init__(self):
        if not math.isfinite(self.gamma):
            raise ConfigError("spending parameter gamma must be finite")


BoundaryFamily = WangTsiatis | HwangShihDeCani


class FutilityStyle(str, enum.Enum):
    BINDING_ZERO = "binding-zero"
    SYMMETRIC = "symmetric"
    NONE = "none"


@dataclass(frozen=True)
class BoundarySet:
    """Per-stage critical values with the attained one-sided level."""

    efficacy: tuple[float, ...]
    futility: tuple[float, ...]
    achieved_alpha: float

    def __post_init__(self):
        K = len(self.efficacy)
        for k in range(K - 1):
            if self.futility[k] >= self.efficacy[k]:
                raise ConfigError("futility bound must stay below efficacy before the last stage")
        if self.futility[K - 1] != self.efficacy[K - 1]:
            raise ConfigError("boundaries must meet at the last stage")


def _apply_futility(efficacy: np.ndarray, style: FutilityStyle) -> np.ndarray:
    f = np.empty_like(efficacy)
    if style is FutilityStyle.BINDING_ZERO:
        f[:-1] = 0.0
    elif style is FutilityStyle.SYMMETRIC:
        f[:-1] = -efficacy[:-1]
    else:
        f[:-1] = -np.inf
    f[-1] = efficacy[-1]
    return f


def _check_fractions(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 1 or rho.size < 1:
        raise ConfigError("information fractions must be a non-empty sequence")
    if rho[0] <= 0 or np.any(np.diff(rho) <= 0):
        raise ConfigError("information fractions must be positive and strictly increasing")
    if abs(rho[-1] - 1.0) > 1e-12:
        raise ConfigError("the last information fraction must be 1")
    return rho


def _rejection_level(rho, e, f, nodes):
    """Total one-sided rejection probability under zero drift.

    At drift zero only information ratios matter, so the fractions serve as
    information levels directly.
    """
    problem = SequentialProblem(tuple(rho), 0.0, tuple(e), tuple(f))
    return exit_probabilities(problem, nodes=nodes).total_reject


def wt_boundaries(
    K: int,
    rho,
    shape: float,
    alpha: float,
    futility: FutilityStyle = FutilityStyle.BINDING_ZERO,
    nodes: int = DEFAULT_NODES,
) -> BoundarySet:
    """Wang-Tsiatis boundaries at one-sided level alpha with binding futility.

    Args:
        K: number of analyses.
        rho: information fractions, increasing to 1, length K.
        shape: power-family shape parameter.
        alpha: one-sided type I error, in (0, 0.5).
        futility: futility style applied while solving (binding).
        nodes: quadrature nodes per stage.
    """
    rho = _check_fractions(rho)
    if len(rho) != K:
        raise ConfigError(f"expected {K} information fractions, got {len(rho)}")
    if not 0.0 < alpha < 0.5:
        raise ConfigError("alpha must lie in (0, 0.5)")
    scale = rho ** (shape - 0.5)

    def level_error(c: float) -> float:
        e = c * scale
        return _rejection_level(rho, e, _apply_futility(e, futility), nodes) - alpha

    lo, hi = _WT_BRACKET
    try:
        c = brentq(level_error, lo, hi, xtol=1e-12)
    except ValueError as exc:
        raise ConfigError(
            f"no Wang-Tsiatis constant in [{lo}, {hi}] attains alpha={alpha}"
        ) from exc
    e = c * scale
    f = _apply_futility(e, futility)
    achieved = _rejection_level(rho, e, f, nodes)
    return BoundarySet(tuple(e), tuple(f), achieved)


def hsd_spend(t: float, gamma: float, alpha: float) -> float:
    """Cumulative error spent at information fraction t.

    Monotone from 0 at t=0 to alpha at t=1; gamma=0 degenerates to the
    linear schedule alpha * t.
    """
    if not 0.0 <= t <= 1.0:
        raise ConfigError("information fraction must lie in [0, 1]")
    if gamma == 0.0:
        return alpha * t
    return alpha * (1.0 - math.exp(-gamma * t)) / (1.0 - math.exp(-gamma))


def spending_boundaries(
    K: int,
    rho,
    gamma: float,
    alpha: float,
    futility: FutilityStyle = FutilityStyle.BINDING_ZERO,
    nodes: int = DEFAULT_NODES,
) -> BoundarySet:
    """Stage-wise boundaries matching the Hwang-Shih-DeCani spend schedule.

    e_k is solved so the cumulative rejection probability at analysis k under
    zero drift equals the spent error at rho_k (with the chosen futility
    bounds binding); the last stage spends exactly the remaining error. For
    the symmetric style each solved interim fixes f_k = -e_k before the next
    stage is solved.
    """
    rho = _check_fractions(rho)
    if len(rho) != K:
        raise ConfigError(f"expected {K} information fractions, got {len(rho)}")
    if not 0.0 < alpha < 0.5:
        raise ConfigError("alpha must lie in (0, 0.5)")

    targets = [hsd_spend(t, gamma, alpha) for t in rho[:-1]] + [alpha]
    increments = np.diff([0.0] + targets)
    if np.any(increments <= 0):
        raise ConfigError("spend increments must be strictly increasing across stages")

    solved: list[float] = []
    for k in range(K):
        frac = rho[: k + 1]

        def cumulative_error(x: float) -> float:
            e = np.array(solved + [x])
            f = _apply_futility(e, futility)
            return _rejection_level(frac, e, f, nodes) - targets[k]

        lo, hi = _SPEND_BRACKET
        try:
            solved.append(brentq(cumulative_error, lo, hi, xtol=1e-12))
        except ValueError as exc:
            raise SolveError(f"stage {k + 1} spending bound not bracketed in [{lo}, {hi}]") from exc

    e = np.asarray(solved)
    f = _apply_futility(e, futility)
    achieved = _rejection_level(rho, e, f, nodes)
    return BoundarySet(tuple(e), tuple(f), achieved)


def build_boundaries(
    family: BoundaryFamily,
    K: int,
    rho,
    alpha: float,
    futility: FutilityStyle,
    nodes: int = DEFAULT_NODES,
) -> BoundarySet:
    """Dispatch on the boundary family."""
    if isinstance(family, WangTsiatis):
        return wt_boundaries(K, rho, family.shape, alpha, futility, nodes)
    if isinstance(family, HwangShihDeCani):
        return spending_boundaries(K, rho, family.gamma, alpha, futility, nodes)
    raise ConfigError(f"unknown boundary family: {family!r}")

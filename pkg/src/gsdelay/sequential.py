"""Normal primitives and stage-wise exit probabilities of a sequential z-test.

The z-statistics of a two-arm group-sequential test follow the canonical
joint distribution: Z_k ~ N(theta * sqrt(I_k), 1) with
Cov(Z_j, Z_k) = sqrt(I_j / I_k) for j <= k, where I_k is the Fisher
information at analysis k. Exit probabilities are computed by propagating
the joint sub-density of the continuing trial across each continuation
interval [f_k, e_k] on a Simpson quadrature grid (a density recursion),
which is exact up to quadrature error and costs O(K * nodes^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ConfigError

__all__ = [
    "SequentialProblem",
    "ExitProbabilities",
    "normal_cdf",
    "normal_quantile",
    "exit_probabilities",
    "DEFAULT_NODES",
]

DEFAULT_NODES = 301

# Grid support: the continuing density at stage k is bounded by the marginal
# N(theta*sqrt(I_k), 1) density, so mass outside mean +/- 8 is < 1e-15.
_TAIL_WIDTH = 8.0


def normal_cdf(x: float) -> float:
    """Standard normal CDF, absolute error below 1e-12 (saturates in the tails)."""
    return float(ndtr(x))


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF for p in (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ConfigError(f"normal_quantile requires p in (0, 1), got {p}")
    return float(ndtri(p))


@dataclass(frozen=True)
class SequentialProblem:
    """A K-stage sequential z-test under a fixed drift.

    Attributes:
        info_levels: Fisher information per stage, strictly increasing.
        drift: effect parameter theta; Z_k has mean theta * sqrt(I_k).
        efficacy: critical values e_k (stop and reject when Z_k > e_k).
        futility: critical values f_k (stop and accept when Z_k <= f_k);
            f_k may be -inf before the last stage, and f_K must equal e_K
            because there is no continuation past stage K.
    """

    info_levels: tuple[float, ...]
    drift: float
    efficacy: tuple[float, ...]
    futility: tuple[float, ...]

    def __post_init__(self):
        info = self.info_levels
        K = len(info)
        if K < 1:
            raise ConfigError("at least one stage is required")
        if len(self.efficacy) != K or len(self.futility) != K:
            raise ConfigError("efficacy/futility boundaries must have one value per stage")
        if any(i <= 0 for i in info):
            raise ConfigError("information levels must be positive")
        if any(b >= a for a, b in zip(info[1:], info[:-1])):
            raise ConfigError("information levels must be strictly increasing")
        if not math.isfinite(self.drift):
            raise ConfigError("drift must be finite")
        for k in range(K - 1):
            if self.futility[k] >= self.efficacy[k]:
                raise ConfigError(
                    f"empty continuation interval at stage {k + 1}: "
                    f"f={self.futility[k]} >= e={self.efficacy[k]}"
                )
        if self.futility[K - 1] != self.efficacy[K - 1]:
            raise ConfigError("final futility bound must equal the final efficacy bound")

    @property
    def num_stages(self) -> int:
        return len(self.info_levels)


@dataclass(frozen=True)
class ExitProbabilities:
    """Per-stage stopping probabilities of a sequential test.

    accept_per_stage[k] is the probability of stopping at stage k+1 with
    Z <= f, reject_per_stage[k] of stopping with Z > e. The two sum to the
    stage stopping probability, and over all stages they sum to one.
    """

    accept_per_stage: tuple[float, ...]
    reject_per_stage: tuple[float, ...]

    @property
    def stop_per_stage(self) -> tuple[float, ...]:
        return tuple(a + r for a, r in zip(self.accept_per_stage, self.reject_per_stage))

    @property
    def total_accept(self) -> float:
        return sum(self.accept_per_stage)

    @property
    def total_reject(self) -> float:
        return sum(self.reject_per_stage)


def _simpson_grid(lo: float, hi: float, nodes: int):
    """Nodes and composite-Simpson weights on [lo, hi] (odd node count)."""
    n = nodes if nodes % 2 == 1 else nodes + 1
    z = np.linspace(lo, hi, n)
    h = (hi - lo) / (n - 1)
    w = np.full(n, h / 3.0)
    w[0] = w[-1] = h / 3.0
    w[1:-1:2] *= 4.0
    w[2:-1:2] *= 2.0
    return z, w


_SQRT_2PI = math.sqrt(2.0 * math.pi)


def exit_probabilities(problem: SequentialProblem, nodes: int = DEFAULT_NODES) -> ExitProbabilities:
    """Exact stage-wise exit probabilities by density recursion.

    At each interim the sub-density of (still running, Z_k = z) is tabulated
    on the continuation interval clipped to mean +/- 8; tail probabilities of
    the next statistic given each node are normal CDFs of the independent
    information increment. Absolute error per probability is far below 1e-6
    at the default grid.

    Args:
        problem: validated test description.
        nodes: quadrature nodes per stage (odd; even values are bumped by one).

    Returns:
        ExitProbabilities at the problem's drift.
    """
    K = problem.num_stages
    info = np.asarray(problem.info_levels, dtype=float)
    e = np.asarray(problem.efficacy, dtype=float)
    f = np.asarray(problem.futility, dtype=float)
    theta = problem.drift

    accept = np.zeros(K)
    reject = np.zeros(K)

    mean_1 = theta * math.sqrt(info[0])
    reject[0] = 1.0 - ndtr(e[0] - mean_1)
    if K == 1:
        accept[0] = ndtr(e[0] - mean_1)
        return ExitProbabilities(tuple(accept), tuple(reject))
    accept[0] = ndtr(f[0] - mean_1) if math.isfinite(f[0]) else 0.0

    # z: grid on the continuation interval, g: sub-density values, w: weights
    lo = max(f[0], mean_1 - _TAIL_WIDTH) if math.isfinite(f[0]) else mean_1 - _TAIL_WIDTH
    hi = min(e[0], mean_1 + _TAIL_WIDTH)
    if hi <= lo:
        return ExitProbabilities(tuple(accept), tuple(reject))
    z, w = _simpson_grid(lo, hi, nodes)
    g = np.exp(-0.5 * (z - mean_1) ** 2) / _SQRT_2PI

    for k in range(1, K):
        d_info = info[k] - info[k - 1]
        sd = math.sqrt(d_info)
        sqrt_ik = math.sqrt(info[k])
        # conditional mean of the score S_k = Z_k * sqrt(I_k) given the previous node
        cond_mean = z * math.sqrt(info[k - 1]) + theta * d_info

        wg = w * g
        upper = (e[k] * sqrt_ik - cond_mean) / sd
        reject[k] = float(np.dot(wg, 1.0 - ndtr(upper)))
        if k == K - 1:
            accept[k] = float(np.dot(wg, ndtr(upper)))
            break
        if math.isfinite(f[k]):
            accept[k] = float(np.dot(wg, ndtr((f[k] * sqrt_ik - cond_mean) / sd)))

        mean_k = theta * sqrt_ik
        lo = max(f[k], mean_k - _TAIL_WIDTH) if math.isfinite(f[k]) else mean_k - _TAIL_WIDTH
        hi = min(e[k], mean_k + _TAIL_WIDTH)
        if hi <= lo:
            break
        z_next, w_next = _simpson_grid(lo, hi, nodes)
        u = (z_next[:, None] * sqrt_ik - cond_mean[None, :]) / sd
        kernel = np.exp(-0.5 * u * u) * (sqrt_ik / (sd * _SQRT_2PI))
        g = kernel @ wg
        z, w = z_next, w_next

    return ExitProbabilities(tuple(accept), tuple(reject))

"""Finite-n comparison of the conditional walk against its limit law."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .asymptotics import DensityModel
from .core import CoinSet, CoinState, initial_state, iter_survival
from .errors import DegenerateSurvivalError
from .observables import Distribution

__all__ = [
    "DEFAULT_LADDER",
    "EmpiricalCDF",
    "ConvergenceReport",
    "empirical_conditional_cdf",
    "kolmogorov_distance",
    "survival_limit_gap",
    "convergence_ladder",
]

DEFAULT_LADDER = (125, 250, 500, 1000, 2000)


@dataclass(frozen=True)
class EmpiricalCDF:
    """Right-continuous distribution function of ``X_n / n``.

    ``jumps`` are the on-parity sites divided by ``n``; ``values[k]`` is the
    CDF at ``jumps[k]`` and ``left[k]`` its limit from the left.
    """

    n: int
    jumps: NDArray[np.float64]
    values: NDArray[np.float64]
    left: NDArray[np.float64]

    @classmethod
    def from_distribution(cls, dist: Distribution) -> "EmpiricalCDF":
        n = dist.step
        keep = (dist.positions - n) % 2 == 0
        probs = dist.probabilities[keep]
        values = np.cumsum(probs)
        return cls(n, dist.positions[keep] / n, values, values - probs)

    def __call__(self, y):
        idx = np.searchsorted(self.jumps, np.asarray(y, dtype=float), side="right") - 1
        out = np.where(idx >= 0, self.values[np.clip(idx, 0, None)], 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ConvergenceReport:
    steps: tuple[int, ...]
    kolmogorov: tuple[float, ...]
    survival_gap: tuple[float, ...]


def _conditional_at(
    coin_state: CoinState, coins: CoinSet, steps: Sequence[int]
) -> dict[int, tuple[Distribution, float]]:
    """Conditional distribution and survival probability at each requested step.

    One survival trajectory serves every ladder point: the pre-sink state at
    step ``k`` is exactly ``U psi_{k-1}^sur``.
    """
    targets = set(steps)
    out: dict[int, tuple[Distribution, float]] = {}
    if not targets:
        return out
    state = initial_state(coin_state)
    p_prev = state.norm2()
    for k, (pre, post) in enumerate(iter_survival(state, coins, max(targets)), start=1):
        p_now = post.norm2()
        if k in targets:
            if not p_prev > 0.0:
                raise DegenerateSurvivalError(f"survival probability after {k - 1} steps vanished")
            dist = Distribution(k, pre.positions, pre.site_probabilities() / p_prev)
            out[k] = (dist, p_now)
        p_prev = p_now
    return out


def empirical_conditional_cdf(coin_state: CoinState, coins: CoinSet, n: int) -> EmpiricalCDF:
    if n < 1:
        raise ValueError("n must be >= 1")
    dist, _ = _conditional_at(coin_state, coins, [n])[n]
    return EmpiricalCDF.from_distribution(dist)


def _sup_distance(cdf: EmpiricalCDF, model: DensityModel) -> float:
    # F_n is constant between jumps and the limit CDF is continuous and
    # nondecreasing, so the supremum is attained at a jump from one side.
    limit = model.cdf(cdf.jumps)
    return float(max(np.max(np.abs(cdf.values - limit)), np.max(np.abs(cdf.left - limit))))


def kolmogorov_distance(
    coin_state: CoinState, coins: CoinSet, n: int, model: DensityModel | None = None
) -> float:
    """``sup_y |F_n(y) - F(y)|`` between the empirical and limit conditional CDFs."""
    if model is None:
        model = DensityModel.from_walk(coins, coin_state)
    return _sup_distance(empirical_conditional_cdf(coin_state, coins, n), model)


def survival_limit_gap(coin_state: CoinState, coins: CoinSet, n: int) -> float:
    model = DensityModel.from_walk(coins, coin_state)
    state = initial_state(coin_state)
    for _, state in iter_survival(state, coins, n):
        pass
    return abs(state.norm2() - model.survival_limit)


def _threads() -> int:
    raw = os.environ.get("QWALK_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def convergence_ladder(
    coin_state: CoinState,
    coins: CoinSet,
    ladder: Sequence[int] = DEFAULT_LADDER,
    model: DensityModel | None = None,
    threads: int | None = None,
) -> ConvergenceReport:
    """Kolmogorov distance and survival gap at every ladder point."""
    if model is None:
        model = DensityModel.from_walk(coins, coin_state)
    steps = tuple(int(n) for n in ladder)
    if any(n < 1 for n in steps):
        raise ValueError("ladder points must be >= 1")
    snaps = _conditional_at(coin_state, coins, steps)
    limit = model.survival_limit

    def one(n: int) -> tuple[float, float]:
        dist, p_sur = snaps[n]
        return _sup_distance(EmpiricalCDF.from_distribution(dist), model), abs(p_sur - limit)

    with ThreadPoolExecutor(max_workers=threads or _threads()) as pool:
        results = list(pool.map(one, steps))
    return ConvergenceReport(steps, tuple(r[0] for r in results), tuple(r[1] for r in results))

"""Probability-level quantities derived from the walker amplitudes.

The conditional distribution applies the *full* step ``U`` to the surviving
state ``psi_{n-1}^sur`` and normalizes by ``P_{n-1}^sur``.  The origin bin is
therefore included; it holds the mass about to be absorbed at step ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .core import CoinSet, CoinState, WalkerState, initial_state, iter_survival, unitary_step
from .errors import DegenerateSurvivalError

__all__ = [
    "Distribution",
    "SurvivalRecord",
    "position_distribution",
    "conditional_distribution",
    "survival_series",
    "polya_series",
]


@dataclass(frozen=True)
class Distribution:
    step: int
    positions: NDArray[np.int64]
    probabilities: NDArray[np.float64]

    def __getitem__(self, j: int) -> float:
        r = len(self.positions) // 2
        if abs(j) > r:
            return 0.0
        return float(self.probabilities[j + r])

    @property
    def mass(self) -> float:
        return float(np.sum(self.probabilities))

    def as_dict(self, drop_zeros: bool = True) -> dict[int, float]:
        return {
            int(j): float(p)
            for j, p in zip(self.positions, self.probabilities)
            if p != 0.0 or not drop_zeros
        }


@dataclass(frozen=True)
class SurvivalRecord:
    """Series indexed by step ``n = 0..n_max``.

    ``survival[0] = 1`` and ``first_return[0] = absorption[0] = 0``.
    """

    survival: NDArray[np.float64]
    first_return: NDArray[np.float64]
    absorption: NDArray[np.float64]

    @property
    def n_max(self) -> int:
        return len(self.survival) - 1


def position_distribution(state: WalkerState) -> Distribution:
    return Distribution(state.step_count, state.positions, state.site_probabilities())


def _check_degenerate(p_prev: float, n: int) -> None:
    if not p_prev > 0.0:
        raise DegenerateSurvivalError(
            f"survival probability after {n - 1} steps is {p_prev!r}; conditional distribution undefined"
        )


def conditional_distribution(coin_state: CoinState, coins: CoinSet, n: int) -> Distribution:
    if n < 1:
        raise ValueError(f"conditional distribution needs n >= 1, got {n}")
    prev = initial_state(coin_state)
    for _, prev in iter_survival(prev, coins, n - 1):
        pass
    p_prev = prev.norm2()
    _check_degenerate(p_prev, n)
    nxt = unitary_step(prev, coins)
    return Distribution(n, nxt.positions, nxt.site_probabilities() / p_prev)


def survival_series(coin_state: CoinState, coins: CoinSet, n_max: int) -> SurvivalRecord:
    """Survival, first-return and cumulative absorption probabilities in one pass.

    ``q(0, k)`` is read from the origin amplitude of ``U psi_{k-1}^sur``
    before the sink removes it. The absorption total is accumulated with
    Neumaier compensation.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    survival = np.empty(n_max + 1)
    first = np.zeros(n_max + 1)
    absorbed = np.zeros(n_max + 1)
    start = initial_state(coin_state)
    survival[0] = start.norm2()
    total, comp = 0.0, 0.0
    for k, (pre, post) in enumerate(iter_survival(start, coins, n_max), start=1):
        origin = pre.amplitude(0)
        q = float(np.vdot(origin, origin).real)
        first[k] = q
        t = total + q
        if abs(total) >= abs(q):
            comp += (total - t) + q
        else:
            comp += (q - t) + total
        total = t
        absorbed[k] = total + comp
        survival[k] = post.norm2()
    return SurvivalRecord(survival, first, absorbed)


def polya_series(coin_state: CoinState, coins: CoinSet, n_max: int) -> float:
    """Partial sum of first-return probabilities up to ``n_max``."""
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    return float(survival_series(coin_state, coins, n_max).absorption[n_max])

"""Brute-force path enumeration, used as an independent check of the simulator.

A path is a sequence of steps ``xi_m = +1`` (right) or ``-1`` (left) with
partial sums ``sigma_m``.  Its weight is the time-ordered product

    w(xi) = P_{xi_n, sigma_{n-1}} ... P_{xi_2, sigma_1} P_{xi_1, 0},

where ``P_{+1, x} = Q_{sgn x}`` and ``P_{-1, x} = P_{sgn x}`` select the coin
of the site the walker is leaving.  Surviving paths avoid the origin at the
intermediate times ``1..n-1``; the endpoint itself may be the origin, which is
how first returns are counted.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np
from numpy.typing import NDArray

from .core import CoinSet, CoinState
from .errors import EnumerationCapError

__all__ = [
    "ENUMERATION_CAP",
    "Path",
    "surviving_paths",
    "all_paths",
    "path_weight",
    "oracle_amplitude",
    "count_surviving_paths",
]

ENUMERATION_CAP = 20


@dataclass(frozen=True)
class Path:
    steps: tuple[int, ...]

    def __post_init__(self) -> None:
        steps = tuple(int(s) for s in self.steps)
        if any(s not in (1, -1) for s in steps):
            raise ValueError(f"path steps must be +1 or -1, got {self.steps!r}")
        object.__setattr__(self, "steps", steps)

    @cached_property
    def partial_sums(self) -> tuple[int, ...]:
        """``(sigma_0, ..., sigma_n)`` with ``sigma_0 = 0``."""
        sums = [0]
        for s in self.steps:
            sums.append(sums[-1] + s)
        return tuple(sums)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def endpoint(self) -> int:
        return self.partial_sums[-1]

    def survives(self) -> bool:
        return all(s != 0 for s in self.partial_sums[1:-1])


def _check_cap(n: int, cap: int) -> None:
    if n < 0:
        raise ValueError("path length must be nonnegative")
    if n > cap:
        raise EnumerationCapError(f"refusing to enumerate 2^{n} paths (cap is {cap})")


def _enumerate(n: int, j: int, avoid_origin: bool) -> Iterator[tuple[int, ...]]:
    prefix: list[int] = []

    def rec(pos: int, remaining: int) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            if pos == j:
                yield tuple(prefix)
            return
        for s in (1, -1):
            nxt = pos + s
            if abs(j - nxt) > remaining - 1:
                continue
            if avoid_origin and nxt == 0 and remaining > 1:
                continue
            prefix.append(s)
            yield from rec(nxt, remaining - 1)
            prefix.pop()

    yield from rec(0, n)


def surviving_paths(n: int, j: int, cap: int = ENUMERATION_CAP) -> list[Path]:
    """Paths of length ``n`` from 0 to ``j`` that avoid 0 at times 1..n-1."""
    _check_cap(n, cap)
    paths = [Path(steps) for steps in _enumerate(n, j, avoid_origin=True)]
    for p in paths:
        if not (p.survives() and p.endpoint == j):
            raise AssertionError(f"enumeration produced an invalid path {p.steps}")
    return paths


def all_paths(n: int, j: int, cap: int = ENUMERATION_CAP) -> list[Path]:
    """Unconstrained paths of length ``n`` from 0 to ``j``."""
    _check_cap(n, cap)
    return [Path(steps) for steps in _enumerate(n, j, avoid_origin=False)]


def _projections(coins: CoinSet) -> dict[tuple[int, int], NDArray[np.complex128]]:
    out = {}
    for sgn in (-1, 0, 1):
        c = coins.coin_at(sgn).as_array()
        p = np.zeros((2, 2), dtype=np.complex128)
        q = np.zeros((2, 2), dtype=np.complex128)
        p[0] = c[0]
        q[1] = c[1]
        out[(-1, sgn)] = p
        out[(1, sgn)] = q
    return out


def path_weight(path: Path, coins: CoinSet, projections=None) -> NDArray[np.complex128]:
    proj = projections if projections is not None else _projections(coins)
    w = np.eye(2, dtype=np.complex128)
    sums = path.partial_sums
    for m, step in enumerate(path.steps):
        w = proj[(step, int(np.sign(sums[m])))] @ w
    return w


def oracle_amplitude(
    coin_state: CoinState,
    coins: CoinSet,
    n: int,
    j: int,
    cap: int = ENUMERATION_CAP,
    absorbing: bool = True,
) -> NDArray[np.complex128]:
    """Sum of ``w(xi) psi_c`` over surviving (or, if not absorbing, all) paths to ``j``."""
    paths = surviving_paths(n, j, cap) if absorbing else all_paths(n, j, cap)
    proj = _projections(coins)
    total = np.zeros((2, 2), dtype=np.complex128)
    for p in paths:
        total += path_weight(p, coins, proj)
    return total @ coin_state.vector


def count_surviving_paths(n: int, j: int) -> int:
    """Count surviving paths by dynamic programming over lattice positions."""
    if abs(j) > n:
        return 0
    counts = {0: 1}
    for t in range(1, n + 1):
        nxt: dict[int, int] = {}
        for pos, c in counts.items():
            for s in (1, -1):
                q = pos + s
                if q == 0 and t < n:
                    continue
                nxt[q] = nxt.get(q, 0) + c
        counts = nxt
    return counts.get(j, 0)

"""
State representation and one-step dynamics of the two-state walk on Z.

The walker lives on a dense buffer of sites ``[-R, R]``; row ``j + R`` of
``WalkerState.amplitudes`` holds the coin vector ``(L, R)`` at site ``j``.
One step applies the coin of the *source* site and shifts the left component
to ``j - 1`` and the right component to ``j + 1``:

    (U psi)(j) = P_{j+1} psi(j+1) + Q_{j-1} psi(j-1),

with ``P_j = [[a_j, b_j], [0, 0]]`` and ``Q_j = [[0, 0], [c_j, d_j]]``.
The coin is ``C_-`` for ``j < 0``, ``C_0`` at the origin and ``C_+`` for
``j > 0``.  The survival dynamics additionally zero the origin after every
step, which models the absorbing sink.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field
from typing import Iterator, Literal

import numpy as np
from numpy.typing import NDArray

from .errors import NonUnitaryCoinError, NormalizationError

__all__ = [
    "UNITARITY_TOL",
    "CoinMatrix",
    "CoinSet",
    "CoinState",
    "WalkerState",
    "hadamard",
    "rotation",
    "initial_state",
    "point_state",
    "unitary_step",
    "apply_sink",
    "survival_step",
    "evolve",
    "iter_survival",
]

UNITARITY_TOL = 1e-12
STATE_NORM_TOL = 1e-9

Mode = Literal["unitary", "survival"]


@dataclass(frozen=True)
class CoinMatrix:
    """2x2 coin ``[[a, b], [c, d]]``.

    Unitarity is checked on construction unless ``check=False``; the
    unchecked form exists for fault injection and linearity tests.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    check: InitVar[bool] = True

    def __post_init__(self, check: bool) -> None:
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if check:
            err = self.unitarity_error()
            if err > UNITARITY_TOL:
                raise NonUnitaryCoinError(
                    f"coin is not unitary (max deviation {err:.3e} > {UNITARITY_TOL:g})"
                )

    @classmethod
    def from_array(cls, m, check: bool = True) -> "CoinMatrix":
        m = np.asarray(m, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError(f"coin must be 2x2, got shape {m.shape}")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1], check=check)

    def as_array(self) -> NDArray[np.complex128]:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def is_mixing(self) -> bool:
        return 0.0 < abs(self.a) < 1.0

    def unitarity_error(self) -> float:
        """Largest deviation among the column-orthonormality and |det| = 1 conditions."""
        a, b, c, d = self.a, self.b, self.c, self.d
        return max(
            abs(abs(a) ** 2 + abs(c) ** 2 - 1.0),
            abs(abs(b) ** 2 + abs(d) ** 2 - 1.0),
            abs(a * b.conjugate() + c * d.conjugate()),
            abs(abs(self.det) - 1.0),
        )

    def swapped(self) -> "CoinMatrix":
        """Conjugate by the L/R swap, i.e. the coin seen by the mirrored walk."""
        return CoinMatrix(self.d, self.c, self.b, self.a, check=False)


def hadamard() -> CoinMatrix:
    s = 1.0 / np.sqrt(2.0)
    return CoinMatrix(s, s, s, -s)


def rotation(angle: float) -> CoinMatrix:
    """Real rotation coin ``[[cos t, sin t], [-sin t, cos t]]``."""
    c, s = np.cos(angle), np.sin(angle)
    return CoinMatrix(c, s, -s, c)


@dataclass(frozen=True)
class CoinSet:
    minus: CoinMatrix
    zero: CoinMatrix
    plus: CoinMatrix

    @classmethod
    def homogeneous(cls, coin: CoinMatrix) -> "CoinSet":
        return cls(coin, coin, coin)

    def coin_at(self, j: int) -> CoinMatrix:
        if j > 0:
            return self.plus
        if j < 0:
            return self.minus
        return self.zero

    def as_table(self) -> NDArray[np.complex128]:
        """Shape (3, 2, 2) array indexed by ``sign(j) + 1``."""
        return np.stack([self.minus.as_array(), self.zero.as_array(), self.plus.as_array()])

    def unitarity_error(self) -> float:
        return max(m.unitarity_error() for m in (self.minus, self.zero, self.plus))

    def mixing(self) -> tuple[bool, bool, bool]:
        return (self.minus.is_mixing, self.zero.is_mixing, self.plus.is_mixing)

    def reflected(self) -> "CoinSet":
        """Coins of the walk mirrored through the origin (j -> -j, L <-> R)."""
        return CoinSet(self.plus.swapped(), self.zero.swapped(), self.minus.swapped())


@dataclass(frozen=True)
class CoinState:
    """Initial coin vector ``(alpha, beta)``, normalized to within 1e-9."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm2 = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm2 - 1.0) > STATE_NORM_TOL:
            raise NormalizationError(f"coin state has |alpha|^2 + |beta|^2 = {norm2!r}, expected 1")

    @property
    def vector(self) -> NDArray[np.complex128]:
        return np.array([self.alpha, self.beta], dtype=np.complex128)

    def swapped(self) -> "CoinState":
        return CoinState(self.beta, self.alpha)


@dataclass(frozen=True)
class WalkerState:
    """Amplitude field on the window ``[-radius, radius]`` after ``step_count`` steps."""

    amplitudes: NDArray[np.complex128]
    step_count: int = 0
    radius: int = field(init=False)

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != 2 or amps.shape[0] % 2 != 1:
            raise ValueError(f"amplitudes must have shape (2R+1, 2), got {amps.shape}")
        if self.step_count < 0:
            raise ValueError("step_count must be nonnegative")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "radius", amps.shape[0] // 2)

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(-self.radius, self.radius + 1)

    def amplitude(self, j: int) -> NDArray[np.complex128]:
        if abs(j) > self.radius:
            return np.zeros(2, dtype=np.complex128)
        return self.amplitudes[j + self.radius]

    def site_probabilities(self) -> NDArray[np.float64]:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    def norm2(self) -> float:
        return float(np.sum(self.site_probabilities()))


def point_state(vector) -> WalkerState:
    """State supported on the origin with an arbitrary (unnormalized) coin vector."""
    v = np.asarray(vector, dtype=np.complex128).reshape(1, 2)
    return WalkerState(v.copy(), 0)


def initial_state(coin_state: CoinState) -> WalkerState:
    v = coin_state.vector
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) > STATE_NORM_TOL:
        raise NormalizationError(f"initial coin state has norm^2 {norm2!r}")
    return point_state(v)


def _coin_entries(coins: CoinSet, radius: int) -> NDArray[np.complex128]:
    """Per-site coin entries on ``[-radius, radius]``, shape (4, 2R+1) for a, b, c, d."""
    signs = np.sign(np.arange(-radius, radius + 1))
    table = coins.as_table().reshape(3, 4)
    return np.ascontiguousarray(table[signs + 1].T)


def _step_raw(amps: NDArray[np.complex128], entries: NDArray[np.complex128]) -> NDArray[np.complex128]:
    # component-major buffers: amps (2, m) on [-R, R], entries (4, m); output (2, m + 2)
    m = amps.shape[1]
    lo, hi = amps
    out = np.empty((2, m + 2), dtype=np.complex128)
    out[0, m:] = 0.0
    out[1, :2] = 0.0
    np.multiply(entries[0], lo, out=out[0, :m])
    out[0, :m] += entries[1] * hi
    np.multiply(entries[2], lo, out=out[1, 2:])
    out[1, 2:] += entries[3] * hi
    return out


def unitary_step(state: WalkerState, coins: CoinSet) -> WalkerState:
    out = _step_raw(state.amplitudes.T, _coin_entries(coins, state.radius))
    return WalkerState(out.T, state.step_count + 1)


def apply_sink(state: WalkerState) -> WalkerState:
    amps = state.amplitudes.copy()
    amps[state.radius] = 0.0
    return WalkerState(amps, state.step_count)


def survival_step(state: WalkerState, coins: CoinSet) -> WalkerState:
    return apply_sink(unitary_step(state, coins))


def _run(start: WalkerState, coins: CoinSet, n: int, sink: bool) -> Iterator[tuple[NDArray, NDArray, int]]:
    """Yield ``(pre_sink, post_sink, step)`` component-major buffers for steps 1..n."""
    radius = start.radius + n
    entries = _coin_entries(coins, radius)
    amps = np.ascontiguousarray(start.amplitudes.T)
    r = start.radius
    for k in range(1, n + 1):
        pre = _step_raw(amps, entries[:, radius - r : radius + r + 1])
        r += 1
        if sink:
            amps = pre.copy()
            amps[:, r] = 0.0
        else:
            amps = pre
        yield pre, amps, start.step_count + k


def evolve(
    coin_state: CoinState | WalkerState,
    coins: CoinSet,
    n: int,
    mode: Mode = "unitary",
) -> WalkerState:
    """Apply ``n`` unitary or survival steps to the walker started at the origin.

    A ``WalkerState`` may be passed in place of the coin state to continue an
    evolution or to evolve an unnormalized vector built with ``point_state``.
    """
    if n < 0:
        raise ValueError(f"number of steps must be nonnegative, got {n}")
    if mode not in ("unitary", "survival"):
        raise ValueError(f"unknown mode {mode!r}")
    start = coin_state if isinstance(coin_state, WalkerState) else initial_state(coin_state)
    amps, step = start.amplitudes.T, start.step_count
    for _, amps, step in _run(start, coins, n, sink=(mode == "survival")):
        pass
    return WalkerState(amps.T, step)


def iter_survival(
    coin_state: CoinState | WalkerState, coins: CoinSet, n: int
) -> Iterator[tuple[WalkerState, WalkerState]]:
    """Yield ``(U psi_{k-1}^sur, psi_k^sur)`` for k = 1..n.

    The first element is the state just before the sink acts; its origin
    amplitude carries the first-return probability.
    """
    start = coin_state if isinstance(coin_state, WalkerState) else initial_state(coin_state)
    for pre, post, step in _run(start, coins, n, sink=True):
        yield WalkerState(pre.T, step), WalkerState(post.T, step)

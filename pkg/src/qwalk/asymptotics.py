"""
Closed-form limit objects of the walk.

Konno's density

    f_K(x; a) = sqrt(1 - a^2) / (pi (1 - x^2) sqrt(a^2 - x^2)),   |x| < a,

governs the unitary walk.  With the sink at the origin each half-line gets
the reweighted density ``4 x^2 / (1 + |x|) f_K(x; a)``, which integrates to
``N(a)`` over ``(0, a)``.

Integrals against ``f_K`` are computed after the substitution
``x = a sin t``, which turns ``f_K dx`` into the bounded measure
``sqrt(1 - a^2) / (pi (1 - a^2 sin^2 t)) dt`` and removes the inverse square
root at the support edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .core import CoinMatrix, CoinSet, CoinState
from .errors import NonMixingCoinError, ParityError

__all__ = [
    "DensityModel",
    "UnitaryDensityModel",
    "konno_density",
    "konno_integral",
    "unitary_lambda",
    "unitary_limit_density",
    "step_weights",
    "normalization_N",
    "conditional_limit_density",
    "conditional_limit_cdf",
    "polya_closed_form",
    "polya_symmetric",
    "density_approximation",
]

QUAD_TOL = 1e-13


def _check_konno_parameter(a: float) -> float:
    a = float(a)
    if not 0.0 < a < 1.0:
        raise NonMixingCoinError(f"Konno parameter must lie in (0, 1), got {a!r}")
    return a


def konno_density(x, a: float):
    """Konno's density; zero on and outside the support edge ``|x| >= a``."""
    a = _check_konno_parameter(a)
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < a
    xs = np.where(inside, x, 0.0)
    val = np.sqrt(1.0 - a * a) / (np.pi * (1.0 - xs * xs) * np.sqrt(a * a - xs * xs))
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def konno_integral(weight: Callable[[float], float], a: float, lo: float, hi: float) -> float:
    """Integrate ``weight(x) f_K(x; a)`` over ``[lo, hi]`` intersected with ``[-a, a]``."""
    a = _check_konno_parameter(a)
    lo, hi = max(lo, -a), min(hi, a)
    if hi <= lo:
        return 0.0
    t_lo, t_hi = np.arcsin(lo / a), np.arcsin(hi / a)
    scale = np.sqrt(1.0 - a * a) / np.pi

    def integrand(t: float) -> float:
        x = a * np.sin(t)
        return weight(x) * scale / (1.0 - x * x)

    val, _ = integrate.quad(integrand, t_lo, t_hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    return float(val)


def unitary_lambda(coin: CoinMatrix, coin_state: CoinState) -> float:
    a0, b0 = coin.a, coin.b
    if not coin.is_mixing:
        raise NonMixingCoinError(f"|a0| = {abs(a0)!r} is not in (0, 1)")
    al, be = coin_state.alpha, coin_state.beta
    cross = a0 * al * b0.conjugate() * be.conjugate()
    return float(abs(al) ** 2 - abs(be) ** 2 + 2.0 * cross.real / abs(a0) ** 2)


@dataclass(frozen=True)
class UnitaryDensityModel:
    """Limit density ``(1 - lam x) f_K(x; a0)`` of the homogeneous unitary walk."""

    a0: float
    lam: float

    def __post_init__(self) -> None:
        _check_konno_parameter(self.a0)
        # 1 - lam x is linear, so nonnegativity on the support is decided at x = +-a0
        if 1.0 - abs(self.lam) * self.a0 < -1e-12:
            raise ValueError(f"lambda = {self.lam!r} makes the density negative on (-a0, a0)")

    @classmethod
    def from_walk(cls, coin: CoinMatrix, coin_state: CoinState) -> "UnitaryDensityModel":
        return cls(abs(coin.a), unitary_lambda(coin, coin_state))

    def pdf(self, x):
        return (1.0 - self.lam * np.asarray(x, dtype=float)) * konno_density(x, self.a0)


def unitary_limit_density(x, model: UnitaryDensityModel):
    return model.pdf(x)


def step_weights(coin0: CoinMatrix, coin_state: CoinState) -> tuple[float, float]:
    """Probabilities ``(P_+, P_-)`` of the first step going right / left.

    Rows of the origin coin are paired with the coin state bilinearly:
    ``P_+ = |c0 alpha + d0 beta|^2``, ``P_- = |a0 alpha + b0 beta|^2``.
    """
    al, be = coin_state.alpha, coin_state.beta
    p_plus = abs(coin0.c * al + coin0.d * be) ** 2
    p_minus = abs(coin0.a * al + coin0.b * be) ** 2
    return float(p_plus), float(p_minus)


def normalization_N(a: float) -> float:
    a = _check_konno_parameter(a)
    s = np.sqrt(1.0 - a * a)
    num = np.pi * a * a - 2.0 * a * s + 2.0 * (1.0 - 2.0 * a * a) * np.arcsin(a)
    return float(num / (np.pi * (1.0 - a * a)))


def _half_weight(x: float) -> float:
    return 4.0 * x * x / (1.0 + abs(x))


@dataclass(frozen=True)
class DensityModel:
    """Conditional limit density of the walk with a sink at the origin."""

    a_plus: float
    a_minus: float
    p_plus: float
    p_minus: float
    n_plus: float = field(init=False)
    n_minus: float = field(init=False)

    def __post_init__(self) -> None:
        if abs(self.p_plus + self.p_minus - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {self.p_plus!r} + {self.p_minus!r}")
        if min(self.p_plus, self.p_minus) < 0.0:
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "n_plus", normalization_N(self.a_plus))
        object.__setattr__(self, "n_minus", normalization_N(self.a_minus))

    @classmethod
    def from_walk(cls, coins: CoinSet, coin_state: CoinState) -> "DensityModel":
        for name in ("plus", "minus"):
            coin = getattr(coins, name)
            if not coin.is_mixing:
                raise NonMixingCoinError(f"coin {name} has |a| = {abs(coin.a)!r}, not in (0, 1)")
        p_plus, p_minus = step_weights(coins.zero, coin_state)
        return cls(abs(coins.plus.a), abs(coins.minus.a), p_plus, p_minus)

    @property
    def survival_limit(self) -> float:
        """Asymptotic survival probability ``P_+ N(a_+) + P_- N(a_-)``."""
        return self.p_plus * self.n_plus + self.p_minus * self.n_minus

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        w = 4.0 * x * x / (1.0 + np.abs(x))
        right = self.p_plus / self.n_plus * w * konno_density(x, self.a_plus)
        left = self.p_minus / self.n_minus * w * konno_density(x, self.a_minus)
        out = np.where(x > 0, right, np.where(x < 0, left, 0.0))
        return float(out) if out.ndim == 0 else out

    def _right_mass(self, y0: float, y1: float) -> float:
        if self.p_plus == 0.0:
            return 0.0
        return self.p_plus / self.n_plus * konno_integral(_half_weight, self.a_plus, max(y0, 0.0), y1)

    def _left_mass(self, y0: float, y1: float) -> float:
        if self.p_minus == 0.0:
            return 0.0
        return self.p_minus / self.n_minus * konno_integral(_half_weight, self.a_minus, y0, min(y1, 0.0))

    def cdf(self, y):
        """Limit CDF; array input is integrated interval by interval and accumulated."""
        y = np.asarray(y, dtype=float)
        flat = y.ravel()
        order = np.argsort(flat, kind="stable")
        out = np.empty_like(flat)
        lo = -1.0
        acc = 0.0
        for idx in order:
            hi = min(max(flat[idx], -1.0), 1.0)
            if hi > lo:
                if lo < 0.0:
                    acc += self._left_mass(lo, min(hi, 0.0))
                if hi > 0.0:
                    acc += self._right_mass(max(lo, 0.0), hi)
                lo = hi
            out[idx] = min(acc, 1.0)
        out = out.reshape(y.shape)
        return float(out) if out.ndim == 0 else out


def conditional_limit_density(x, model: DensityModel):
    return model.pdf(x)


def conditional_limit_cdf(y, model: DensityModel):
    return model.cdf(y)


def polya_closed_form(coins: CoinSet, coin_state: CoinState) -> float:
    """Return probability ``1 - P_+ N(|a_+|) - P_- N(|a_-|)``."""
    return 1.0 - DensityModel.from_walk(coins, coin_state).survival_limit


def polya_symmetric(a: float) -> float:
    """Recurrence probability when ``|a_+| = |a_-| = a`` (independent of the coin state)."""
    a = _check_konno_parameter(a)
    s = np.sqrt(1.0 - a * a)
    return float(2.0 * (a * s + (1.0 - 2.0 * a * a) * np.arccos(a)) / (np.pi * (1.0 - a * a)))


def density_approximation(j: int, n: int, model) -> float:
    """Approximate ``nu_n(j)`` by ``(2/n) rho(j/n)``; ``model`` supplies ``pdf``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if (j - n) % 2:
        raise ParityError(f"site {j} is unreachable after {n} steps (parity)")
    return 2.0 / n * float(model.pdf(j / n))

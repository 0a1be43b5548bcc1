"""
Generating functions of the surviving walk on the positive half-line.

For ``j >= 1`` the time generating function of the surviving path weights is
rank one,

    Xi_j(z) = lam(z)^(j-1) |u(z)> <v|,   u(z) = (lam(z) f(z), z),   <v| = (c0, d0),

and on the unit circle ``z = exp(i (theta - delta/2))``, ``exp(i delta) = det C_+``,
the functions ``lam`` and ``f`` have explicit branch formulas.  On the arc
``S = {|sin theta| >= |c_+|}`` the value ``lam`` is unimodular,

    lam = exp(i delta/2) |a_+|/a_+ exp(i kappa),  cos kappa = cos theta / |a_+|,

and off it ``lam`` is the root of modulus < 1 of the quadratic
``a z lam^2 - (1 + det z^2) lam + d z = 0``.  ``f`` behaves the other way
round: unimodular off ``S`` and of modulus <= 1 on ``S``.

Amplitudes are recovered as Taylor coefficients by integrating the boundary
values against ``exp(-i n theta)`` over the circle.  The negative half-line is handled
by mirroring the walk (``j -> -j`` with the two coin components exchanged).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy import optimize

from .core import CoinMatrix, CoinSet, CoinState
from .errors import NonMixingCoinError

__all__ = [
    "DEFAULT_SAMPLES",
    "GenFuncEvaluator",
    "genfunc_amplitudes",
    "stationary_angles",
]

DEFAULT_SAMPLES = 2**16
OVERSAMPLING = 64
_PANEL_ORDER = 16


def _sgn(x):
    return np.sign(x)


@dataclass(frozen=True)
class GenFuncEvaluator:
    """Boundary values of ``lam``, ``f`` and ``Xi_j`` for a fixed ``C_+``.

    ``coin_zero`` only enters through the row ``<v| = (c0, d0)``.
    """

    coin_plus: CoinMatrix
    coin_zero: CoinMatrix
    delta: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.coin_plus.is_mixing:
            raise NonMixingCoinError(f"C_+ has |a| = {abs(self.coin_plus.a)!r}, not in (0, 1)")
        object.__setattr__(self, "delta", float(np.angle(self.coin_plus.det) % (2 * np.pi)))

    @property
    def abs_a(self) -> float:
        return abs(self.coin_plus.a)

    @property
    def abs_c(self) -> float:
        return abs(self.coin_plus.c)

    def z(self, theta):
        return np.exp(1j * (np.asarray(theta, dtype=float) - self.delta / 2))

    def in_sigma(self, theta):
        """Arc where ``lam`` is unimodular; the boundary ``|sin| = |c_+|`` belongs to it."""
        return np.abs(np.sin(theta)) >= self.abs_c

    def kappa(self, theta):
        """Branch with ``cos kappa = cos theta/|a_+|`` and ``sgn sin kappa = sgn sin theta``."""
        theta = np.asarray(theta, dtype=float)
        ratio = np.clip(np.cos(theta) / self.abs_a, -1.0, 1.0)
        return _sgn(np.sin(theta)) * np.arccos(ratio)

    def kappa_prime(self, theta):
        """Derivative of ``kappa`` on the interior of the arc (positive there)."""
        theta = np.asarray(theta, dtype=float)
        return np.abs(np.sin(theta)) / np.sqrt(self.abs_a**2 - np.cos(theta) ** 2)

    def eta(self, theta):
        """Branch with ``sin eta = sin theta/|c_+|`` and ``sgn cos eta = sgn cos theta``."""
        theta = np.asarray(theta, dtype=float)
        base = np.arcsin(np.clip(np.sin(theta) / self.abs_c, -1.0, 1.0))
        return np.where(np.cos(theta) < 0, np.pi - base, base)

    def lambda_tilde(self, theta):
        theta = np.asarray(theta, dtype=float)
        a = self.coin_plus.a
        pre = np.exp(1j * self.delta / 2) * self.abs_a / a
        x = np.abs(np.cos(theta)) / self.abs_a
        outer = _sgn(np.cos(theta)) * (x - np.sqrt(np.maximum(x * x - 1.0, 0.0)))
        inner = np.exp(1j * self.kappa(theta))
        return pre * np.where(self.in_sigma(theta), inner, outer)

    def f_tilde(self, theta):
        theta = np.asarray(theta, dtype=float)
        c = self.coin_plus.c
        pre = -np.exp(1j * theta) * self.abs_c / c
        s = np.abs(np.sin(theta)) / self.abs_c
        inner = 1j * _sgn(np.sin(theta)) * (s - np.sqrt(np.maximum(s * s - 1.0, 0.0)))
        outer = np.exp(1j * self.eta(theta))
        return pre * np.where(self.in_sigma(theta), inner, outer)

    def u_tilde(self, theta) -> NDArray[np.complex128]:
        """Column vector ``(lam f, z)``; shape ``(2,) + theta.shape``."""
        return np.stack([self.lambda_tilde(theta) * self.f_tilde(theta), self.z(theta)])

    def row(self) -> NDArray[np.complex128]:
        return np.array([self.coin_zero.c, self.coin_zero.d], dtype=np.complex128)

    def xi_tilde(self, j: int, theta) -> NDArray[np.complex128]:
        """Rank-one 2x2 matrix ``lam^(j-1) |u><v|``; shape ``(2, 2) + theta.shape``."""
        if j < 1:
            raise ValueError(f"xi_tilde is defined for j >= 1, got {j}")
        lam = self.lambda_tilde(theta)
        u = self.u_tilde(theta) * lam ** (j - 1)
        v = self.row()
        return u[:, None, ...] * v.reshape((1, 2) + (1,) * np.ndim(theta))

    def branch_angles(self) -> NDArray[np.float64]:
        """The four angles in ``[0, 2 pi)`` where ``|sin theta| = |c_+|``."""
        t = float(np.arcsin(self.abs_c))
        return np.array([t, np.pi - t, np.pi + t, 2 * np.pi - t])

    def quadrature_nodes(self, samples: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Nodes and weights on ``[0, 2 pi)`` adapted to the square-root branch points.

        Each arc between consecutive branch angles is mapped by
        ``theta = start + L sin^2(pi u / 2)``, which makes the boundary values
        smooth in ``u``, and integrated by composite Gauss-Legendre panels.
        """
        panels = max(samples // (4 * _PANEL_ORDER), 1)
        x, w = np.polynomial.legendre.leggauss(_PANEL_ORDER)
        edges = np.linspace(0.0, 1.0, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wu = (half[:, None] * w[None, :]).ravel()
        cuts = self.branch_angles()
        starts = cuts
        lengths = np.diff(np.append(cuts, cuts[0] + 2 * np.pi))
        theta = (starts[:, None] + lengths[:, None] * np.sin(np.pi * u / 2) ** 2).ravel()
        jac = (lengths[:, None] * (np.pi / 2) * np.sin(np.pi * u) * wu).ravel()
        return np.mod(theta, 2 * np.pi), jac

    def extract_coefficients(
        self,
        j: int,
        n_max: int,
        coin_state: CoinState,
        samples: int = DEFAULT_SAMPLES,
        method: str = "arcs",
    ) -> NDArray[np.complex128]:
        """Surviving amplitudes ``psi_n(j)`` for ``n = 0..n_max``; shape ``(n_max + 1, 2)``.

        ``method="dft"`` samples the circle uniformly and uses an FFT; its
        aliasing error decays only like ``samples**-1.5`` because of the branch
        points.  ``method="arcs"`` spends the same number of samples on the
        branch-adapted rule of ``quadrature_nodes``.
        """
        if j < 1:
            raise ValueError(f"positive half-line only, got j = {j}")
        if samples < OVERSAMPLING * max(n_max, 1):
            raise ValueError(
                f"{samples} samples are too few for n_max = {n_max} (need >= {OVERSAMPLING * max(n_max, 1)})"
            )
        pairing = complex(self.row() @ coin_state.vector)
        n = np.arange(n_max + 1)
        if method == "dft":
            theta = 2.0 * np.pi * np.arange(samples) / samples
            lam = self.lambda_tilde(theta)
            boundary = self.u_tilde(theta) * (lam ** (j - 1) * pairing)
            coeffs = np.fft.fft(boundary, axis=1)[:, : n_max + 1] / samples
        elif method == "arcs":
            theta, weights = self.quadrature_nodes(samples)
            lam = self.lambda_tilde(theta)
            boundary = self.u_tilde(theta) * (lam ** (j - 1) * pairing * weights / (2 * np.pi))
            step = np.exp(-1j * theta)
            phase = np.ones_like(step)
            coeffs = np.empty((2, n_max + 1), dtype=np.complex128)
            for k in range(n_max + 1):
                coeffs[:, k] = boundary @ phase
                phase = phase * step
        else:
            raise ValueError(f"unknown method {method!r}")
        return (coeffs * np.exp(1j * n * self.delta / 2)).T


def genfunc_amplitudes(
    coins: CoinSet,
    coin_state: CoinState,
    j: int,
    n_max: int,
    samples: int = DEFAULT_SAMPLES,
    method: str = "arcs",
) -> NDArray[np.complex128]:
    """Surviving amplitudes at ``j != 0`` for ``n = 0..n_max`` from the generating function."""
    if j > 0:
        ev = GenFuncEvaluator(coins.plus, coins.zero)
        return ev.extract_coefficients(j, n_max, coin_state, samples, method)
    if j < 0:
        mirror = coins.reflected()
        ev = GenFuncEvaluator(mirror.plus, mirror.zero)
        amps = ev.extract_coefficients(-j, n_max, coin_state.swapped(), samples, method)
        return amps[:, ::-1]
    raise ValueError("the origin carries no surviving amplitude")


def stationary_angles(evaluator: GenFuncEvaluator, y: float) -> NDArray[np.float64]:
    """The four angles in ``[0, 2 pi)`` where ``y kappa'(theta) = 1``, for ``0 < y < |a_+|``."""
    a = evaluator.abs_a
    if not 0.0 < y < a:
        raise ValueError(f"velocity must lie in (0, {a}), got {y}")
    edge = np.arccos(a)

    def g(t):
        return y * evaluator.kappa_prime(t) - 1.0

    eps = 1e-12
    t1 = optimize.brentq(g, edge + eps, np.pi / 2, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return np.array([t1, np.pi - t1, np.pi + t1, 2 * np.pi - t1])

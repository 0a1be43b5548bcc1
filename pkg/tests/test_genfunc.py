import math

import numpy as np
import pytest

from qwalk.core import CoinMatrix, CoinSet, CoinState, hadamard, initial_state, rotation, survival_step
from qwalk.errors import NonMixingCoinError
from qwalk.genfunc import GenFuncEvaluator, genfunc_amplitudes, stationary_angles

from conftest import SQRT_HALF, biased_coins, random_coin_set

GRID = np.linspace(0.0, 2 * np.pi, 10_000, endpoint=False)
PLUS_COINS = {"hadamard": hadamard(), "biased": rotation(math.pi / 3), "random": random_coin_set(5).plus}


def evaluator(name):
    return GenFuncEvaluator(PLUS_COINS[name], hadamard())


def away_from_branch(ev, theta, gap=1e-6):
    d = np.abs(np.angle(np.exp(1j * (theta[:, None] - ev.branch_angles()[None, :]))))
    return np.min(d, axis=1) > gap


def simulated(coins, state, n_max):
    states = [initial_state(state)]
    for _ in range(n_max):
        states.append(survival_step(states[-1], coins))
    return states


@pytest.mark.parametrize("name", sorted(PLUS_COINS))
class TestBranches:
    def test_delta(self, name):
        ev = evaluator(name)
        assert 0 <= ev.delta < 2 * np.pi
        assert abs(np.exp(1j * ev.delta) - ev.coin_plus.det) < 1e-14

    def test_lambda_moduli(self, name):
        ev = evaluator(name)
        lam = np.abs(ev.lambda_tilde(GRID))
        sigma = ev.in_sigma(GRID)
        assert np.max(np.abs(lam[sigma] - 1)) < 1e-10
        interior = ~sigma & away_from_branch(ev, GRID)
        assert np.all(lam[interior] < 1)

    def test_f_moduli(self, name):
        ev = evaluator(name)
        f = np.abs(ev.f_tilde(GRID))
        sigma = ev.in_sigma(GRID)
        assert np.max(np.abs(f[~sigma] - 1)) < 1e-10
        assert np.all(f[sigma] <= 1 + 1e-10)

    def test_kappa_defining_equations(self, name):
        ev = evaluator(name)
        # kappa is 0 or pi on the boundary, where the sign condition is vacuous
        th = GRID[ev.in_sigma(GRID) & away_from_branch(ev, GRID)]
        k = ev.kappa(th)
        assert np.max(np.abs(np.cos(k) - np.cos(th) / ev.abs_a)) < 1e-12
        assert np.all(np.sign(np.sin(k)) == np.sign(np.sin(th)))

    def test_eta_defining_equations(self, name):
        ev = evaluator(name)
        th = GRID[~ev.in_sigma(GRID) & away_from_branch(ev, GRID)]
        e = ev.eta(th)
        assert np.max(np.abs(np.sin(e) - np.sin(th) / ev.abs_c)) < 1e-12
        assert np.all(np.sign(np.cos(e)) == np.sign(np.cos(th)))

    def test_lambda_solves_quadratic(self, name):
        ev = evaluator(name)
        c = ev.coin_plus
        z, lam = ev.z(GRID), ev.lambda_tilde(GRID)
        assert np.max(np.abs(c.a * z * lam**2 - (1 + c.det * z**2) * lam + c.d * z)) < 1e-13

    def test_f_matches_resolvent_form(self, name):
        # f is the sum over excursions that leave j = 1 to the right and come back
        ev = evaluator(name)
        c = ev.coin_plus
        th = GRID[away_from_branch(ev, GRID)]
        z, lam = ev.z(th), ev.lambda_tilde(th)
        assert np.max(np.abs(ev.f_tilde(th) - z**2 * c.b / (1 - z * c.a * lam))) < 1e-12

    def test_continuity_across_branch_points(self, name):
        # square-root branch points: the jump over a gap 2h scales like sqrt(h)
        ev = evaluator(name)
        for tb in ev.branch_angles():
            for h in (1e-4, 1e-7, 1e-10, 1e-13):
                dl = abs(ev.lambda_tilde(tb + h) - ev.lambda_tilde(tb - h))
                df = abs(ev.f_tilde(tb + h) - ev.f_tilde(tb - h))
                assert max(dl, df) < 4 * math.sqrt(h)

    def test_boundary_belongs_to_sigma(self, name):
        ev = evaluator(name)
        th = np.concatenate([GRID, ev.branch_angles()])
        assert np.array_equal(ev.in_sigma(th), np.abs(np.sin(th)) >= ev.abs_c)
        # either branch is within sqrt(ulp) of the unit circle at the computed cut
        assert np.allclose(np.abs(ev.lambda_tilde(ev.branch_angles())), 1.0, atol=1e-7)

    def test_xi_rank_one(self, name):
        ev = evaluator(name)
        th = GRID[::50]
        for j in (1, 2, 7):
            xi = ev.xi_tilde(j, th)
            det = xi[0, 0] * xi[1, 1] - xi[0, 1] * xi[1, 0]
            assert np.max(np.abs(det)) < 1e-15
            op = np.linalg.norm(np.moveaxis(xi, -1, 0), 2, axis=(1, 2))
            assert np.all(op <= np.sqrt(2) + 1e-12)

    def test_xi_action(self, name):
        ev = evaluator(name)
        th = GRID[::100]
        psi = np.array([0.6, 0.8j])
        pairing = ev.row() @ psi
        out = np.einsum("abk,b->ak", ev.xi_tilde(4, th), psi)
        expected = pairing * ev.lambda_tilde(th) ** 3 * ev.u_tilde(th)
        assert np.max(np.abs(out - expected)) < 1e-14
        assert np.max(np.abs(ev.xi_tilde(1, th) - ev.u_tilde(th)[:, None] * ev.row()[None, :, None])) == 0.0

    def test_stationary_norm_relation(self, name):
        ev = evaluator(name)
        for y in np.linspace(0.05, 0.95, 7) * ev.abs_a:
            th = stationary_angles(ev, y)
            assert np.max(np.abs(y * ev.kappa_prime(th) - 1)) < 1e-10
            norm2 = np.sum(np.abs(ev.u_tilde(th)) ** 2, axis=0)
            assert np.max(np.abs(norm2 - 2 / (1 + y))) < 1e-8
            assert np.allclose(norm2, 1 + np.abs(ev.f_tilde(th)) ** 2, atol=1e-14)


class TestHadamardValues:
    def test_lambda_at_half_pi(self):
        # delta = pi, and kappa(pi/2) = +pi/2, so lambda = i * i
        ev = GenFuncEvaluator(hadamard(), hadamard())
        assert ev.delta == pytest.approx(math.pi)
        assert ev.in_sigma(math.pi / 2)
        assert abs(ev.lambda_tilde(math.pi / 2) - (-1)) < 1e-15

    def test_f_at_zero(self):
        ev = GenFuncEvaluator(hadamard(), hadamard())
        assert not ev.in_sigma(0.0)
        assert abs(ev.f_tilde(0.0) - (-1)) < 1e-15

    def test_rejects_non_mixing(self):
        with pytest.raises(NonMixingCoinError):
            GenFuncEvaluator(CoinMatrix(1, 0, 0, 1), hadamard())

    def test_xi_requires_positive_site(self):
        with pytest.raises(ValueError):
            GenFuncEvaluator(hadamard(), hadamard()).xi_tilde(0, 0.3)


class TestExtraction:
    def test_first_amplitude(self, hadamard_coins, up):
        amps = genfunc_amplitudes(hadamard_coins, up, 1, 1, samples=2**12)
        assert np.max(np.abs(amps[1] - [0, SQRT_HALF])) < 1e-6

    def test_unreachable_and_off_parity(self, hadamard_coins, up):
        amps = genfunc_amplitudes(hadamard_coins, up, 6, 20, samples=2**12)
        assert np.max(np.abs(amps[:6])) < 1e-6
        assert np.max(np.abs(amps[1::2])) < 1e-6

    def test_sample_guard(self, hadamard_coins, up):
        with pytest.raises(ValueError):
            genfunc_amplitudes(hadamard_coins, up, 1, 50, samples=3000)

    def test_origin_rejected(self, hadamard_coins, up):
        with pytest.raises(ValueError):
            genfunc_amplitudes(hadamard_coins, up, 0, 5)

    @pytest.mark.parametrize(
        "coins",
        [CoinSet.homogeneous(hadamard()), biased_coins(), random_coin_set(9)],
        ids=["hadamard", "biased", "random"],
    )
    def test_matches_simulation(self, coins):
        state = CoinState(0.6, 0.8j)
        states = simulated(coins, state, 50)
        for j in [*range(1, 11), *range(-10, 0)]:
            amps = genfunc_amplitudes(coins, state, j, 50)
            sim = np.array([s.amplitude(j) for s in states])
            assert np.max(np.abs(amps - sim)) < 1e-6

    def test_uniform_transform_converges(self, hadamard_coins, up):
        # plain DFT sampling is limited by the branch points; error shrinks with M
        states = simulated(hadamard_coins, up, 20)
        sim = np.array([s.amplitude(3) for s in states])
        errs = [
            np.max(np.abs(genfunc_amplitudes(hadamard_coins, up, 3, 20, samples=m, method="dft") - sim))
            for m in (2**12, 2**14, 2**16)
        ]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-5

    def test_unknown_method(self, hadamard_coins, up):
        with pytest.raises(ValueError):
            genfunc_amplitudes(hadamard_coins, up, 1, 5, method="magic")

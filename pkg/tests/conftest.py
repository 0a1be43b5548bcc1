import math
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from qwalk.core import CoinMatrix, CoinSet, CoinState, hadamard, rotation

settings.register_profile(
    "qwalk",
    derandomize=True,
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("qwalk")

SQRT_HALF = 1.0 / math.sqrt(2.0)


def random_coin_set(seed: int) -> CoinSet:
    rng = np.random.default_rng(seed)
    coins = [CoinMatrix.from_array(unitary_group.rvs(2, random_state=rng)) for _ in range(3)]
    return CoinSet(*coins)


def biased_coins() -> CoinSet:
    return CoinSet(rotation(math.pi / 8), hadamard(), rotation(math.pi / 3))


@pytest.fixture
def hadamard_coins() -> CoinSet:
    return CoinSet.homogeneous(hadamard())


@pytest.fixture
def biased() -> CoinSet:
    return biased_coins()


@pytest.fixture
def up() -> CoinState:
    return CoinState(1.0, 0.0)


@pytest.fixture
def biased_state() -> CoinState:
    return CoinState(0.6, 0.8)


@pytest.fixture
def one_sided_state() -> CoinState:
    return CoinState(SQRT_HALF, -SQRT_HALF)


@st.composite
def coin_states(draw) -> CoinState:
    angles = st.floats(0.0, 2 * math.pi, allow_nan=False)
    t = draw(st.floats(0.0, math.pi / 2, allow_nan=False))
    p, q = draw(angles), draw(angles)
    return CoinState(math.cos(t) * complex(math.cos(p), math.sin(p)), math.sin(t) * complex(math.cos(q), math.sin(q)))


seeds = st.integers(0, 2**31 - 1)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

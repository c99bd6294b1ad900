import numpy as np
import pytest

from seqassign import fair_dice, make_distribution


@pytest.fixture(scope="session")
def dice():
    return fair_dice()


def draw_distribution(rng: np.random.Generator, k: int | None = None):
    """Random valid distribution: distinct integer support, positive probs."""
    if k is None:
        k = int(rng.integers(3, 9))
    support = np.sort(rng.choice(200, size=k, replace=False) - 100.0)
    probs = rng.uniform(0.05, 1.0, size=k)
    probs /= probs.sum()
    return make_distribution(support.tolist(), probs.tolist())


@pytest.fixture
def random_dist():
    return draw_distribution

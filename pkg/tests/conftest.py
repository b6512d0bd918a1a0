import sys
from pathlib import Path

import numpy as np
import pytest

from stieltjes_cf.sampling import random_class_g

sys.path.insert(0, str(Path(__file__).parent))

SUITE_SEED = 7321


def make_suite(count=200, seed=SUITE_SEED):
    """Random class-G instances with n <= 4, d <= 5 and mixed residue ranks."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, 5))
        d = int(rng.integers(1, 6))
        out.append(random_class_g(rng, n, d))
    return out


@pytest.fixture(scope="session")
def suite():
    return make_suite()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

import numpy as np
import pytest

from thermocone.simplex import GibbsContext, trivial_context


@pytest.fixture
def ctx321():
    """Context with gamma = (3/6, 2/6, 1/6), the worked-example spectrum."""
    return GibbsContext.build([0.0, np.log(1.5), np.log(3.0)], 1.0)


@pytest.fixture
def ctx3_beta0():
    return trivial_context(3)


def random_state(rng, d):
    x = rng.exponential(size=d)
    return x / x.sum()

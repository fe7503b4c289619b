import numpy as np
import pytest

from ergorate.arithmetic import (Frequency, PartialQuotients, expand_cf,
                                 golden_mean, sqrt2_minus_1)


@pytest.fixture(scope="session")
def golden():
    return golden_mean()


@pytest.fixture(scope="session")
def golden_cf(golden):
    # reaches certified_len 31 (q_31 = 2178309)
    return expand_cf(golden, max_q=4 * 10 ** 6)


@pytest.fixture(scope="session")
def sqrt2m1():
    return sqrt2_minus_1()


@pytest.fixture(scope="session")
def index_rule_freq():
    """a_m = m."""
    return Frequency(PartialQuotients((), "index"))


@pytest.fixture(scope="session")
def spike_freq():
    """a_7 = 1000, all other partial quotients 1."""
    return Frequency(PartialQuotients((), "spike", (7, 1000)))


@pytest.fixture
def rng():
    return np.random.default_rng(42)

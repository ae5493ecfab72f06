import numpy as np
import pytest

from sfk import corpus, make_chart


@pytest.fixture(scope="session")
def o2():
    return corpus.o_minus(2)


@pytest.fixture(scope="session")
def o2_chart(o2):
    return make_chart(o2)


@pytest.fixture(scope="session")
def o2_tn_chart(o2):
    return make_chart(o2, (1, -1))


@pytest.fixture(scope="session")
def quad_chart():
    return make_chart(corpus.quadrant())


@pytest.fixture(scope="session")
def corpus_charts():
    """Every corpus polygon with nu = 0 and its three interior nuts."""
    return [(e.name, nu, make_chart(e.polygon, nu)) for e in corpus.corpus() for nu in e.nuts]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

import pytest

from models import QuadConfig, TruncationConfig
from services.verifier import SuiteContext
from services.workers import WorkerPool


@pytest.fixture
def small_trunc():
    """A few dozen functionals on [-2, 2], enough for the identities to show"""
    return TruncationConfig(k_max=4, m_max=60, box_radius=2.0)


@pytest.fixture
def tiny_trunc():
    return TruncationConfig(k_max=3, m_max=15, box_radius=1.0)


@pytest.fixture
def quad():
    return QuadConfig()


@pytest.fixture
def pool():
    with WorkerPool(2) as workers:
        yield workers


@pytest.fixture
def suite_context(small_trunc):
    return SuiteContext(trunc=small_trunc, dimension=1)

import numpy as np
import pytest

from deepthought.engine import OracleEngine, Role
from deepthought.params import ProtocolParams


@pytest.fixture
def params():
    return ProtocolParams()


@pytest.fixture
def engine():
    return OracleEngine(seed=1234)


@pytest.fixture
def populated():
    """Engine with one submitter, five voters, and two certifiers."""
    eng = OracleEngine(seed=99)
    submitter = eng.subscribe(Role.SUBMITTER)
    voters = [eng.subscribe(Role.VOTER) for _ in range(5)]
    certifiers = [eng.subscribe(Role.CERTIFIER) for _ in range(2)]
    return eng, submitter, voters, certifiers


@pytest.fixture
def rng():
    return np.random.default_rng(7)

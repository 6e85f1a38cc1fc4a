import json

import pytest

from utils.fock_utils import make_register, tail_policy_cutoff
from utils.state_utils import SINGLE_CHAIN, TWO_CHAIN

# small squeezing keeps the tail-policy registers cheap
GAMMA = 0.3


@pytest.fixture
def gamma() -> float:
    return GAMMA


@pytest.fixture
def single_chain_register():
    return SINGLE_CHAIN.register(tail_policy_cutoff(GAMMA))


@pytest.fixture
def two_chain_register():
    return TWO_CHAIN.register(tail_policy_cutoff(GAMMA))


@pytest.fixture
def field_register():
    return make_register(["b1", "b2"], [12, 12])


@pytest.fixture
def write_config(tmp_path):
    """Write a config dict to <tmp_path>/<name> and return the path"""
    def _write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path
    return _write

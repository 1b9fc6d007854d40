import json

import pytest

from app.core.random_streams import RandomStream
from app.models.distributions import Exponential, Uniform


@pytest.fixture
def stream():
    return RandomStream(seed=12345, index=0)


@pytest.fixture
def heterogeneous5():
    return [
        Uniform(lo=0.0, hi=1.0),
        Uniform(lo=0.0, hi=2.0),
        Exponential(rate=1.0),
        Uniform(lo=0.0, hi=5.0),
        Exponential(rate=0.2),
    ]


@pytest.fixture
def write_config(tmp_path):
    """Write a JSON experiment config and return its path"""
    def _write(payload, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path
    return _write

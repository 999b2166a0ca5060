import numpy as np
import pytest

from regularity.profiles import RadialProfile


@pytest.fixture(autouse=True)
def _no_out_override(monkeypatch):
    monkeypatch.delenv("GSLAB_OUT", raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def zero2():
    return RadialProfile.zero(n=2)


@pytest.fixture
def zero3():
    return RadialProfile.zero(n=3)


@pytest.fixture
def ex3_profile():
    return RadialProfile.ex3(10.0, n=2)

import numpy as np
import pytest

from jetnet.networks import JetNetwork, NetworkConfig
from pdezoo.registry import build_problem


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_net(rng):
    """Width-16 tanh network on (x, t)."""
    return JetNetwork(NetworkConfig(depth=2, width=16, activation="tanh"), 1, rng)


@pytest.fixture
def sin_net(rng):
    return JetNetwork(NetworkConfig(depth=2, width=16, activation="sin"), 1, rng)


@pytest.fixture
def burgers():
    return build_problem("burgers")


@pytest.fixture
def allen_cahn():
    return build_problem("allen_cahn")


@pytest.fixture
def kdv():
    return build_problem("kdv")


@pytest.fixture(autouse=True)
def isolated_outputs(tmp_path, monkeypatch):
    """Keep reference caches and default run directories out of the working tree."""
    monkeypatch.setattr("refsolve.storage.REFERENCE_CACHE_DIR", str(tmp_path / "_references"))
    monkeypatch.setattr("experiments.settings.OUTPUT_ROOT", str(tmp_path / "runs"))
    return tmp_path


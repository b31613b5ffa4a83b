import numpy as np
import pytest

from qudit_ftqec import build_system, default_config
from qudit_ftqec.spin_model import SpinTopology


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def system4(cfg):
    return build_system(cfg, 4)


@pytest.fixture(scope="session")
def system6(cfg):
    return build_system(cfg, 6)


@pytest.fixture(scope="session")
def system8(cfg):
    return build_system(cfg, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def single_site_topology(b_field=1.0, g=2.0, s=0.5):
    return SpinTopology(
        spins=(s,), heisenberg_couplings=(), dm_couplings=(),
        g_factors=(g,), field_b=b_field,
    )


def dimer_topology(j, b_field=0.0):
    return SpinTopology(
        spins=(0.5, 0.5), heisenberg_couplings=((0, 1, j),),
        dm_couplings=(), g_factors=(2.0, 2.0), field_b=b_field,
    )


@pytest.fixture
def make_single_site():
    return single_site_topology


@pytest.fixture
def make_dimer():
    return dimer_topology

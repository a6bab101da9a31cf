import math

import pytest

from thermocollide import EngineSpec


@pytest.fixture
def qubit_engine() -> EngineSpec:
    """The reference qubit engine: hot/cold ramps 100..10 and 0.1..1."""
    return EngineSpec(
        beta_hot=1e-2,
        beta_cold=1.0,
        omega_hot_last=10.0,
        omega_cold_last=1.0,
        n_hot=10,
        n_cold=10,
        d_system=2,
        d_hot=2,
        d_cold=2,
        interaction="swap",
    )


@pytest.fixture
def jc_engine() -> EngineSpec:
    return EngineSpec(
        beta_hot=1e-2,
        beta_cold=1.0,
        omega_hot_last=10.0,
        omega_cold_last=1.0,
        n_hot=10,
        n_cold=10,
        d_system=2,
        d_hot=2,
        d_cold=2,
        interaction="jaynes_cummings",
        theta=math.pi / 2,
        eps=1e-9,
    )

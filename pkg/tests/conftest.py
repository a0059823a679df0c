import pytest

from uscsim.fockspace import Truncation
from uscsim.model import ModeSpec, QubitSpec


@pytest.fixture
def qubit_spec():
    return QubitSpec(
        tunnel_splitting_ghz=12.3,
        persistent_current_na=60.0,
        loss_rate_ghz=0.2,
        dephasing_rate_ghz=0.2,
    )


@pytest.fixture
def modes():
    return (
        ModeSpec(base_frequency_ghz=5.0, v_shape_beta_per_phi0=0.775, coupling_ghz=2.815),
        ModeSpec(base_frequency_ghz=9.7, v_shape_beta_per_phi0=0.919, coupling_ghz=2.180),
    )


@pytest.fixture
def trunc():
    return Truncation(6, 4)

# Shared fixtures: small arrays in scaled units plus the two-ring device in rad/s

# Standard Library Imports
import os

# Third-Party Library Imports
import pytest

# Local Application/Library-Specific Imports
from modules.core import configs
from modules.core.utils import ghz_to_rad
from modules.network.resonator_graph import Waveguide, build_array

DEVICES_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'devices')


@pytest.fixture
def device_path():
    return lambda name: os.path.join(DEVICES_DIR, name)


@pytest.fixture(autouse=True)
def no_shared_executor():
    # Library calls run inline unless a test starts the pool itself
    configs.sweep_executor = None
    configs.executor_list = []
    yield
    configs.sweep_executor = None
    configs.executor_list = []


@pytest.fixture
def two_ring():
    """u = 10, Gamma = 4 (gamma = 2 per mode), lossless."""
    return build_array(2, 0.0, [(0, 1, 10.0)], [Waveguide(0, 4.0, 'L')])


@pytest.fixture
def two_ring_lossy():
    return build_array(2, 0.0, [(0, 1, 10.0)], [Waveguide(0, 4.0, 'L')], kappa_int=0.5)


@pytest.fixture
def two_ring_2wg():
    return build_array(2, 0.0, [(0, 1, 10.0)], [Waveguide(0, 4.0, 'L'), Waveguide(1, 3.0, 'R')], kappa_int=0.2)


@pytest.fixture
def four_ring():
    """Four-ring cycle with v = 2u: modes at -3u, -u, u, 3u."""
    u, v = 1.0, 2.0
    return build_array(4, 0.0, [(0, 1, u), (1, 2, v), (2, 3, u), (0, 3, v)], [Waveguide(0, 0.4, 'L')])


@pytest.fixture
def measured_params():
    splitting = ghz_to_rad(28.2)
    gamma_l = ghz_to_rad(5.31)
    kappa_int = ghz_to_rad(0.17)
    return {
        'u': splitting / 2.0,
        'Gamma': gamma_l,
        'gamma': gamma_l / 2.0,
        'kappa_int': kappa_int,
        'alpha': gamma_l / kappa_int,
    }


@pytest.fixture
def measured_array(measured_params):
    return build_array(2, 0.0, [(0, 1, measured_params['u'])], [Waveguide(0, measured_params['Gamma'], 'L')], measured_params['kappa_int'])


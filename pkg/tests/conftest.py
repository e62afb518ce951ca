import numpy as np
import pytest

from mecoffload.channel import FadingParams, RadioParams
from mecoffload.taskmodel import Scenario, ScenarioDistribution, SystemConfig, UserTask, sample_scenario


@pytest.fixture
def radio():
    return RadioParams.from_snr(3.0, 6.0)


@pytest.fixture
def default_config():
    return SystemConfig(radio=RadioParams.from_snr(3.0, 6.0), fading=FadingParams(0.05), g0=1.0, tau=35.63)


def random_scenario(seed, K=10, tau=35.63, mean_B=4.0, cpu_cap=None):
    cfg = SystemConfig(tau=tau, cpu_cap=cpu_cap)
    return sample_scenario(ScenarioDistribution(K=K, mean_B=mean_B), cfg, np.random.default_rng(seed))


def make_scenario(users, tau=35.63, cpu_cap=None, g0=1.0):
    cfg = SystemConfig(tau=tau, cpu_cap=cpu_cap, g0=g0)
    return Scenario(cfg, tuple(UserTask(**u) for u in users))

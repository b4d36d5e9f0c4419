import dataclasses

import pytest

from uavcov import NetworkConfig
from uavcov.config import AnalysisSettings


@pytest.fixture(scope="session")
def cfg():
    """Reference scenario (Thomas clusters, sigma = 10)."""
    return NetworkConfig()


@pytest.fixture(scope="session")
def cfg_matern():
    return NetworkConfig().with_cluster("matern", 20.0)


@pytest.fixture(scope="session")
def fast_settings():
    """Smaller Monte Carlo budget for module-level cross checks."""
    return AnalysisSettings(mc_trials=30_000)


def small_network(**over):
    """Scenario with sparse deployments, cheap for brute-force oracles."""
    base = dict(lambda_u=2e-5, lambda_g=2e-6)
    base.update(over)
    return dataclasses.replace(NetworkConfig(), **base)

import math

import pytest

from darisa import ArrayConfig, Cluster, ClusterSet, Side, element_positions
from darisa.experiments import ScenarioConfig


def isotropic_set() -> ClusterSet:
    return ClusterSet((Cluster.isotropic(),))


def square_array(side: Side, n: int, spacing: float, count: int = 1) -> ArrayConfig:
    return ArrayConfig(side=side, n_x=n, n_y=n, spacing=spacing, darisa_count=count)


def small_scenario(**overrides) -> ScenarioConfig:
    """Fast scenario: M=2 tx / N=1 rx panels of 1 wavelength square."""
    base = dict(
        tx=square_array(Side.TRANSMIT, 4, 0.25, count=2),
        rx=square_array(Side.RECEIVE, 4, 0.25, count=1),
        clusters=isotropic_set(),
        slots=2,
        snr_grid_db=(0.0, 10.0, 20.0),
        trials=3,
        seed=77,
        epsilon=0.01,
        tol=1e-5,
        max_iters=400,
        num_draws=50,
    )
    base.update(overrides)
    return ScenarioConfig(**base)


@pytest.fixture
def tiny_layouts():
    tx_cfg = square_array(Side.TRANSMIT, 4, 0.25, count=2)
    rx_cfg = square_array(Side.RECEIVE, 4, 0.25, count=1)
    return (tx_cfg, rx_cfg, element_positions(tx_cfg), element_positions(rx_cfg))

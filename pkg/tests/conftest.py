import numpy as np
import pytest

from mcis.topology import Topology, build_bs_grid, cells_of
from mcis.model import NetworkConfig


def topo_from_points(points, g: int, b: int = 1) -> Topology:
    """Hand-built topology over explicit positions (for geometry tests)."""
    points = np.asarray(points, dtype=float)
    b0 = int(round(b**0.5))
    node_cell = cells_of(points, g)
    node_bscell = cells_of(points, b0)
    order = np.argsort(node_cell, kind="stable").astype(np.int64)
    counts = np.bincount(node_cell, minlength=g * g)
    start = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    return Topology(
        nodes=points,
        bs=build_bs_grid(NetworkConfig(b=b)),
        g=g,
        b0=b0,
        a_requested=1.0 / (g * g),
        node_cell=node_cell,
        node_bscell=node_bscell,
        cell_order=order,
        cell_start=start,
    )


@pytest.fixture
def small_cfg():
    return NetworkConfig(
        n=400, b=4, C=6, C_A=4, C_I=2, m=2, W=10.0, W_A=6.0, W_I=2.0,
        H=2, delta=1.0, seed=11,
    )

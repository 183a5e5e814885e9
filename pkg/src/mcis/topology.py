"""Random node placement, base-station tessellation, and the routing cell grid.

The unit square is tiled twice: a b0 x b0 grid of BS-cells (one base station
at each center) and a finer g x g grid of routing cells whose target area
a(n) balances the connectivity, interference and destination-bottleneck
requirements.  Cells are half-open [x1,x2) x [y1,y2) except the top/right
row, which is closed, so every point maps to exactly one cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DomainError, NetworkConfig

# The constructive scheme needs relays, so cells must not be empty in
# practice.  Below this expected per-cell occupancy the grid is coarsened
# (a(n) raised to MIN_OCCUPANCY/n); the cell-size formula's own dense-cell
# premise (a(n) > 50 ln n / n) fails long before this floor binds.
MIN_OCCUPANCY = 3.0


def cell_area(n: int, C_A: int, H: int) -> float:
    """Target routing-cell area a(n) = min(max(t1, t2), t3), natural logs.

    t1 = 100*sqrt(C_A)*ln n/n, t2 = ln^{3/2} n/(sqrt(C_A)*n) and
    t3 = ln^{3/2} n * ln(H^2 ln n) / (n^{3/2} * lnln(H^2 ln n)).
    """
    if n < 2 or C_A < 1 or H < 1:
        raise DomainError(f"cell_area needs n >= 2, C_A >= 1, H >= 1, got {(n, C_A, H)}")
    ln_n = math.log(n)
    x = H * H * ln_n
    if x <= math.e:
        raise DomainError(f"cell_area undefined: H^2*ln(n) = {x:.4f} <= e")
    t1 = 100.0 * math.sqrt(C_A) * ln_n / n
    t2 = ln_n**1.5 / (math.sqrt(C_A) * n)
    t3 = ln_n**1.5 * math.log(x) / (n**1.5 * math.log(math.log(x)))
    return min(max(t1, t2), t3)


def grid_side(n: int, C_A: int, H: int, min_occupancy: float = MIN_OCCUPANCY) -> int:
    """Routing-grid side g = round(1/sqrt(a)) >= 1, a floored for occupancy."""
    a = max(cell_area(n, C_A, H), min_occupancy / n)
    return max(1, round(1.0 / math.sqrt(a)))


def cell_of(x: float, y: float, g: int) -> int:
    """Row-major cell index of a point; top/right boundary folds inward."""
    ix = min(int(x * g), g - 1)
    iy = min(int(y * g), g - 1)
    return iy * g + ix


def cells_of(points: np.ndarray, g: int) -> np.ndarray:
    """Vectorized cell_of for an (n, 2) position array."""
    idx = np.minimum((points * g).astype(np.int64), g - 1)
    return idx[:, 1] * g + idx[:, 0]


def place_nodes(cfg: NetworkConfig) -> np.ndarray:
    """n i.i.d. uniform positions on the unit square, fixed by cfg.seed (PCG64)."""
    rng = np.random.default_rng(cfg.seed)
    return rng.random((cfg.n, 2))


def build_bs_grid(cfg: NetworkConfig) -> np.ndarray:
    """Base-station positions: the exact centers of the b0 x b0 BS-cells."""
    b0 = cfg.b0
    if b0 * b0 != cfg.b:
        raise DomainError(f"b={cfg.b} is not a perfect square")
    centers = (np.arange(b0) + 0.5) / b0
    xx, yy = np.meshgrid(centers, centers)  # row i varies y, col j varies x
    return np.column_stack([xx.ravel(), yy.ravel()])


@dataclass(frozen=True)
class Topology:
    """Immutable snapshot of one placed network instance."""

    nodes: np.ndarray          # (n, 2) positions
    bs: np.ndarray             # (b, 2) base-station positions
    g: int                     # routing-grid side
    b0: int                    # BS-grid side
    a_requested: float         # a(n) from the formula
    node_cell: np.ndarray      # routing-cell index per node
    node_bscell: np.ndarray    # BS-cell index per node
    cell_order: np.ndarray     # node ids sorted by routing cell
    cell_start: np.ndarray     # CSR offsets into cell_order, len g*g+1

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def a_cell(self) -> float:
        """Actual cell area after rounding the grid side."""
        return 1.0 / (self.g * self.g)

    def cell_members(self, cell: int) -> np.ndarray:
        """Node ids inside a routing cell, ascending."""
        return self.cell_order[self.cell_start[cell] : self.cell_start[cell + 1]]

    def occupancy(self) -> np.ndarray:
        """Histogram of node counts over all g*g routing cells."""
        return np.bincount(self.node_cell, minlength=self.g * self.g)


def build_topology(cfg: NetworkConfig, cell_area_override: float | None = None) -> Topology:
    """Place nodes and base stations and index both grids."""
    nodes = place_nodes(cfg)
    bs = build_bs_grid(cfg)
    if cell_area_override is not None:
        a_req = cell_area_override
        g = max(1, round(1.0 / math.sqrt(a_req)))
    else:
        a_req = cell_area(cfg.n, cfg.C_A, cfg.H)
        g = grid_side(cfg.n, cfg.C_A, cfg.H)
    node_cell = cells_of(nodes, g)
    node_bscell = cells_of(nodes, cfg.b0)
    cell_order = np.argsort(node_cell, kind="stable").astype(np.int64)
    counts = np.bincount(node_cell, minlength=g * g)
    cell_start = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    return Topology(
        nodes=nodes,
        bs=bs,
        g=g,
        b0=cfg.b0,
        a_requested=a_req,
        node_cell=node_cell,
        node_bscell=node_bscell,
        cell_order=cell_order,
        cell_start=cell_start,
    )


def cells_on_segment(p: np.ndarray, q: np.ndarray, g: int) -> list[int]:
    """Ordered cells visited by the straight segment p -> q on a g x g grid.

    Grid-traversal (DDA) walk: consecutive cells differ by at most one row
    and one column (a diagonal step happens only at an exact corner
    crossing), so relays drawn from consecutive cells are at most
    sqrt(8)/g apart.
    """
    x0, y0 = float(p[0]), float(p[1])
    x1, y1 = float(q[0]), float(q[1])
    ix = min(int(x0 * g), g - 1)
    iy = min(int(y0 * g), g - 1)
    jx = min(int(x1 * g), g - 1)
    jy = min(int(y1 * g), g - 1)
    cells = [iy * g + ix]
    if (ix, iy) == (jx, jy):
        return cells
    dx = x1 - x0
    dy = y1 - y0
    step_x = 1 if jx > ix else -1 if jx < ix else 0
    step_y = 1 if jy > iy else -1 if jy < iy else 0
    inv = 1.0 / g

    def t_next(i: int, x_start: float, d: float, step: int) -> float:
        if step == 0 or d == 0.0:
            return math.inf
        edge = (i + (1 if step > 0 else 0)) * inv
        return (edge - x_start) / d

    t_max_x = t_next(ix, x0, dx, step_x)
    t_max_y = t_next(iy, y0, dy, step_y)
    t_delta_x = abs(inv / dx) if dx != 0.0 else math.inf
    t_delta_y = abs(inv / dy) if dy != 0.0 else math.inf
    for _ in range(4 * g + 8):
        if t_max_x < t_max_y:
            ix += step_x
            t_max_x += t_delta_x
        elif t_max_y < t_max_x:
            iy += step_y
            t_max_y += t_delta_y
        else:  # exact corner: advance both axes
            ix += step_x
            iy += step_y
            t_max_x += t_delta_x
            t_max_y += t_delta_y
        ix = min(max(ix, 0), g - 1)
        iy = min(max(iy, 0), g - 1)
        cells.append(iy * g + ix)
        if ix == jx and iy == jy:
            return cells
    # Floating-point stalemate: fall back to ending at the destination cell.
    cells.append(jy * g + jx)
    return cells

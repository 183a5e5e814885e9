"""Guard-zone (protocol model) interference: predicate, cell bound, conflict graph.

A reception at X2 from X1 survives iff every other same-channel transmitter
X3 satisfies dist(X3, X2) >= (1+delta)*dist(X1, X2).  Two layers build on
this: a per-cell neighborhood count (whose size the constant 4*(1+delta)^2
bounds) and a conservative node-level conflict graph used to schedule
concurrent transmissions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DomainError


def is_concurrent_set_feasible(tx: np.ndarray, rx: np.ndarray, delta: float) -> bool:
    """True iff all transmissions (tx[i] -> rx[i]) may share one channel.

    Checks the guard-zone inequality for every receiver against every other
    transmitter in the set.
    """
    tx = np.atleast_2d(np.asarray(tx, dtype=float))
    rx = np.atleast_2d(np.asarray(rx, dtype=float))
    k = len(tx)
    if k <= 1:
        return True
    # d[j, i] = dist(tx_j, rx_i)
    d = np.linalg.norm(tx[:, None, :] - rx[None, :, :], axis=2)
    own = np.diagonal(d)
    req = (1.0 + delta) * own[None, :]
    ok = d >= req - 1e-12
    np.fill_diagonal(ok, True)
    return bool(ok.all())


def interfering_cell_bound(delta: float) -> int:
    """ceil(4*(1+delta)^2): max cells whose nodes can disturb a given cell."""
    if delta <= 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    return math.ceil(4.0 * (1.0 + delta) ** 2)


def interfering_cells(cell: int, g: int, delta: float) -> list[int]:
    """Cells (incl. the cell itself) inside the guard-zone counting region.

    The region is the square inscribed in the disk of radius
    (1+delta)*sqrt(2*a_cell) around the cell center -- the same region whose
    area/a_cell ratio gives the 4*(1+delta)^2 constant -- and a cell counts
    when it lies entirely inside.  Border cells see truncated sets.
    """
    if delta <= 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    reach = math.floor(delta + 0.5 + 1e-12)  # offsets with |o| <= delta + 1/2
    cx, cy = cell % g, cell // g
    out = []
    for oy in range(-reach, reach + 1):
        for ox in range(-reach, reach + 1):
            x, y = cx + ox, cy + oy
            if 0 <= x < g and 0 <= y < g:
                out.append(y * g + x)
    return out


@dataclass(frozen=True)
class InterferenceGraph:
    """Symmetric conflict graph in CSR form (no self loops)."""

    n: int
    nbr: np.ndarray      # concatenated neighbor lists
    start: np.ndarray    # offsets, len n+1
    radius: float

    def neighbors(self, i: int) -> np.ndarray:
        return self.nbr[self.start[i] : self.start[i + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.start)

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    @property
    def num_edges(self) -> int:
        return len(self.nbr) // 2

    def edge_list(self) -> list[tuple[int, int]]:
        out = []
        for i in range(self.n):
            for j in self.neighbors(i):
                if i < j:
                    out.append((i, int(j)))
        return out

    def to_csv(self) -> str:
        """Edge-list dump ``u,v`` (each undirected edge once) for debugging."""
        lines = ["u,v"] + [f"{u},{v}" for u, v in self.edge_list()]
        return "\n".join(lines) + "\n"


class SpatialBuckets:
    """Uniform-grid neighbor index over points in the unit square.

    Bucket side >= radius, so all points within ``radius`` of a query point
    live in the 3x3 bucket patch around it.
    """

    def __init__(self, points: np.ndarray, radius: float):
        self.points = points
        self.radius = radius
        self.side = max(1, int(1.0 / max(radius, 1e-9)))
        ij = np.minimum((points * self.side).astype(np.int64), self.side - 1)
        self.keys = ij[:, 1] * self.side + ij[:, 0]
        self.order = np.argsort(self.keys, kind="stable")
        self.starts = np.searchsorted(self.keys[self.order], np.arange(self.side**2 + 1))

    def patch(self, i: int) -> np.ndarray:
        """All point ids in the 3x3 bucket patch around point i (incl. i)."""
        s = self.side
        key = int(self.keys[i])
        cx, cy = key % s, key // s
        chunks = []
        for oy in (-1, 0, 1):
            y = cy + oy
            if not 0 <= y < s:
                continue
            x0, x1 = max(cx - 1, 0), min(cx + 1, s - 1)
            chunks.append(self.order[self.starts[y * s + x0] : self.starts[y * s + x1 + 1]])
        return chunks[0] if len(chunks) == 1 else np.concatenate(chunks)

    def neighbors(self, i: int) -> np.ndarray:
        """Point ids within ``radius`` of point i (excluding i), any order."""
        cand = self.patch(i)
        delta = self.points[cand] - self.points[i]
        near = cand[delta[:, 0] ** 2 + delta[:, 1] ** 2 < self.radius**2]
        return near[near != i]


def graph_from_edges(n: int, u: np.ndarray, v: np.ndarray, radius: float) -> InterferenceGraph:
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    start = np.searchsorted(src, np.arange(n + 1))
    return InterferenceGraph(n=n, nbr=dst.astype(np.int64), start=start.astype(np.int64), radius=radius)


def build_interference_graph(points: np.ndarray, r: float, delta: float) -> InterferenceGraph:
    """Conflict graph: edge when transmitter separation < (2+delta)*r.

    At that separation a transmitter can never violate the guard zone of the
    other's receiver (for receivers within range r), so non-adjacent nodes
    may always share a channel.
    """
    radius = (2.0 + delta) * r
    n = len(points)
    # bucketed pair search
    side = max(1, int(1.0 / max(radius, 1e-9)))
    ij = np.minimum((points * side).astype(np.int64), side - 1)
    key = ij[:, 1] * side + ij[:, 0]
    order = np.argsort(key, kind="stable")
    sorted_key = key[order]
    starts = np.searchsorted(sorted_key, np.arange(side * side + 1))
    us, vs = [], []
    for cell in range(side * side):
        a = order[starts[cell] : starts[cell + 1]]
        if len(a) == 0:
            continue
        cx, cy = cell % side, cell // side
        for oy in (0, 1):
            for ox in (-1, 0, 1):
                if oy == 0 and ox < 0:
                    continue  # each unordered cell pair once
                x, y = cx + ox, cy + oy
                if not (0 <= x < side and 0 <= y < side):
                    continue
                ncell = y * side + x
                b = order[starts[ncell] : starts[ncell + 1]]
                if len(b) == 0:
                    continue
                d = np.linalg.norm(points[a][:, None, :] - points[b][None, :, :], axis=2)
                if ncell == cell:
                    iu, iv = np.nonzero((d < radius) & (a[:, None] < b[None, :]))
                else:
                    iu, iv = np.nonzero(d < radius)
                us.append(a[iu])
                vs.append(b[iv])
    if us:
        u = np.concatenate(us)
        v = np.concatenate(vs)
    else:
        u = np.empty(0, dtype=np.int64)
        v = np.empty(0, dtype=np.int64)
    return graph_from_edges(n, u, v, radius)

"""Constructive TDMA: edge-color slots, mini-slots x channels, and the BS frame.

One second splits into E edge-color slots (a proper edge coloring of the
routing multigraph serializes each node's own hops), each further split
into M mini-slots per ad-hoc channel (a proper coloring of each slot's
hop-conflict graph separates interfering transmitters).  Base stations
follow the round-robin frame: clusters of k8+1 BS-cells take turns, one
cell of each cluster active per slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .interference import (
    InterferenceGraph,
    SpatialBuckets,
    interfering_cell_bound,
    is_concurrent_set_feasible,
)
from .model import NetworkConfig
from .routing import FlowSet, RoutingGraph
from .topology import Topology


def _lowest_free_color(mask: int) -> int:
    """Index of the lowest zero bit of a used-color bitmask."""
    free = ~mask & (mask + 1)
    return free.bit_length() - 1


def edge_color(graph: RoutingGraph) -> tuple[np.ndarray, int]:
    """Greedy proper edge coloring of the hop multigraph, first-fit in hop order.

    Uses at most 2*maxdeg - 1 colors; returns (0-based color per hop, count).
    """
    if _edge_color_jit is not None and graph.num_hops > 4096:
        cap = max(2 * graph.max_degree(), 1)
        return _edge_color_jit(graph.hop_tx, graph.hop_rx, graph.n, cap)
    used = [0] * graph.n  # bitmask of colors touching each node
    colors = np.zeros(graph.num_hops, dtype=np.int64)
    ncolors = 0
    for h in range(graph.num_hops):
        u = int(graph.hop_tx[h])
        v = int(graph.hop_rx[h])
        c = _lowest_free_color(used[u] | used[v])
        colors[h] = c
        bit = 1 << c
        used[u] |= bit
        used[v] |= bit
        if c + 1 > ncolors:
            ncolors = c + 1
    return colors, max(ncolors, 1)


def _make_edge_color_jit():
    try:
        from numba import njit
    except ImportError:
        return None

    @njit(cache=True)
    def kernel(tx, rx, n, cap):  # pragma: no cover - exercised via wrapper
        words = (cap + 2 + 63) // 64
        used = np.zeros((n, words), np.uint64)
        nh = tx.shape[0]
        colors = np.zeros(nh, np.int64)
        ncolors = 1
        for h in range(nh):
            u = tx[h]
            v = rx[h]
            c = -1
            for w in range(words):
                free = ~(used[u, w] | used[v, w])
                if free != np.uint64(0):
                    off = 0
                    while (free >> np.uint64(off)) & np.uint64(1) == np.uint64(0):
                        off += 1
                    c = w * 64 + off
                    break
            colors[h] = c
            wi = c // 64
            bit = np.uint64(1) << np.uint64(c % 64)
            used[u, wi] |= bit
            used[v, wi] |= bit
            if c + 1 > ncolors:
                ncolors = c + 1
        return colors, ncolors

    return kernel


_edge_color_jit = _make_edge_color_jit()


def vertex_color(graph: InterferenceGraph) -> tuple[np.ndarray, int]:
    """Greedy proper vertex coloring, first-fit in index order (<= maxdeg+1)."""
    colors = np.full(graph.n, -1, dtype=np.int64)
    ncolors = 0
    for i in range(graph.n):
        mask = 0
        for j in graph.neighbors(i):
            cj = colors[j]
            if cj >= 0:
                mask |= 1 << int(cj)
        c = _lowest_free_color(mask)
        colors[i] = c
        if c + 1 > ncolors:
            ncolors = c + 1
    return colors, max(ncolors, 1)


def vertex_color_geometric(
    points: np.ndarray, radius: float, subset: np.ndarray | None = None
) -> tuple[np.ndarray, int]:
    """First-fit coloring of the disk graph (separation < radius) without
    materializing edges; identical to vertex_color on the explicit graph.

    ``subset`` restricts coloring to those point ids (others get color -1).
    """
    n = len(points)
    ids = np.arange(n) if subset is None else np.asarray(subset)
    colors = np.full(n, -1, dtype=np.int64)
    if len(ids) == 0:
        return colors, 1
    buckets = SpatialBuckets(points[ids], radius)
    local = np.full(len(ids), -1, dtype=np.int64)
    ncolors = 0
    for k in range(len(ids)):
        mask = 0
        for j in buckets.neighbors(k):
            cj = local[j]
            if cj >= 0:
                mask |= 1 << int(cj)
        c = _lowest_free_color(mask)
        local[k] = c
        if c + 1 > ncolors:
            ncolors = c + 1
    colors[ids] = local
    return colors, max(ncolors, 1)


def assign_minislot(s: int, C_A: int) -> tuple[int, int]:
    """Mini-slot and channel for 1-based vertex color s: (ceil(s/C_A), (s mod C_A)+1)."""
    if s < 1 or C_A < 1:
        raise ValueError(f"need s >= 1 and C_A >= 1, got {(s, C_A)}")
    return math.ceil(s / C_A), (s % C_A) + 1


@dataclass(frozen=True)
class BSFrame:
    """Round-robin BS-cell activation: frame of k8+1 slots, one active cell
    per cluster per slot."""

    k8: int
    cell_slot: np.ndarray       # active slot index per BS-cell
    per_cell_rate: float        # average bits/sec a BS-cell sustains

    @property
    def frame_len(self) -> int:
        return self.k8 + 1


def build_bs_schedule_sigma1(cfg: NetworkConfig) -> BSFrame:
    """Cluster the b BS-cells row-major into groups of k8+1; group member j
    transmits in slot j using min(C_I, m) channels at full rate."""
    k8 = interfering_cell_bound(cfg.delta)
    frame_len = k8 + 1
    cell_slot = np.arange(cfg.b, dtype=np.int64) % frame_len
    if cfg.W_I <= 0 or cfg.C_I < 1:
        active_rate = 0.0
    elif cfg.C_I <= cfg.m:
        active_rate = cfg.W_I
    else:
        active_rate = cfg.m / cfg.C_I * cfg.W_I
    return BSFrame(k8=k8, cell_slot=cell_slot, per_cell_rate=active_rate / frame_len)


@dataclass(frozen=True)
class Schedule:
    """One second of the two-level ad-hoc TDMA plus the BS frame."""

    E: int                      # edge-color slots per second
    M: int                      # mini-slots per edge-color slot
    C_A: int
    hop_tx: np.ndarray
    hop_rx: np.ndarray
    hop_flow: np.ndarray
    hop_eslot: np.ndarray
    hop_mslot: np.ndarray       # 1-based
    hop_channel: np.ndarray     # 1-based, <= C_A
    vertex_colors_used: int
    bs_frame: BSFrame

    @property
    def num_hops(self) -> int:
        return len(self.hop_tx)

    @property
    def minislot_seconds(self) -> float:
        return 1.0 / (self.E * self.M)

    def entries(self):
        """Yield (node, eslot, mslot, channel, role, flow) rows, tx then rx per hop."""
        for h in range(self.num_hops):
            base = (
                int(self.hop_eslot[h]),
                int(self.hop_mslot[h]),
                int(self.hop_channel[h]),
            )
            yield (int(self.hop_tx[h]), *base, "tx", int(self.hop_flow[h]))
            yield (int(self.hop_rx[h]), *base, "rx", int(self.hop_flow[h]))

    def to_csv(self) -> str:
        lines = ["node,eslot,mslot,channel,role,flow"]
        lines += [",".join(map(str, row)) for row in self.entries()]
        return "\n".join(lines) + "\n"


def color_concurrent_hops(tx: np.ndarray, rx: np.ndarray, delta: float) -> tuple[np.ndarray, int]:
    """Greedy first-fit coloring of one edge-color slot's hops under the
    exact guard-zone conflict test.

    Hops i and j conflict iff either transmitter sits inside the other
    reception's guard zone: dist(tx_j, rx_i) < (1+delta)*len_i or
    vice versa.  Same-color hops therefore always pass the predicate.
    Conflicting transmitters are never farther than (2+delta)*max hop
    length apart, which bounds the candidate search.
    """
    k = len(tx)
    colors = np.full(k, -1, dtype=np.int64)
    if k == 0:
        return colors, 1
    if _color_hops_jit is not None and k > 256:
        return _color_hops_jit(np.ascontiguousarray(tx), np.ascontiguousarray(rx), delta)
    return _color_hops_py(tx, rx, delta)


def _color_hops_py(tx: np.ndarray, rx: np.ndarray, delta: float) -> tuple[np.ndarray, int]:
    k = len(tx)
    colors = np.full(k, -1, dtype=np.int64)
    lens2 = ((tx - rx) ** 2).sum(axis=1)
    guard2 = (1.0 + delta) ** 2 * lens2
    radius = max((2.0 + delta) * math.sqrt(float(lens2.max())), 1e-9)
    buckets = SpatialBuckets(tx, radius)
    flags = np.zeros(k + 1, dtype=bool)
    ncolors = 1
    for i in range(k):
        cand = buckets.patch(i)
        cand = cand[colors[cand] >= 0]
        c = 0
        if cand.size:
            d_ji = ((tx[cand] - rx[i]) ** 2).sum(axis=1)
            d_ij = ((rx[cand] - tx[i]) ** 2).sum(axis=1)
            conflict = (d_ji < guard2[i]) | (d_ij < guard2[cand])
            used = colors[cand[conflict]]
            if used.size:
                flags[used] = True
                c = int(np.argmin(flags))
                flags[used] = False
        colors[i] = c
        if c + 1 > ncolors:
            ncolors = c + 1
    return colors, ncolors


def _make_color_hops_jit():
    try:
        from numba import njit
    except ImportError:
        return None

    @njit(cache=True)
    def kernel(tx, rx, delta):  # pragma: no cover - exercised via wrapper
        k = tx.shape[0]
        colors = np.full(k, -1, np.int64)
        lens2 = np.empty(k)
        maxlen2 = 0.0
        for i in range(k):
            dx = tx[i, 0] - rx[i, 0]
            dy = tx[i, 1] - rx[i, 1]
            lens2[i] = dx * dx + dy * dy
            if lens2[i] > maxlen2:
                maxlen2 = lens2[i]
        guard_sq = (1.0 + delta) * (1.0 + delta)
        radius = (2.0 + delta) * math.sqrt(maxlen2)
        if radius < 1e-9:
            radius = 1e-9
        side = int(1.0 / radius)
        if side < 1:
            side = 1
        # counting sort of transmitters into side x side buckets
        keys = np.empty(k, np.int64)
        counts = np.zeros(side * side + 1, np.int64)
        for i in range(k):
            bx = int(tx[i, 0] * side)
            if bx > side - 1:
                bx = side - 1
            by = int(tx[i, 1] * side)
            if by > side - 1:
                by = side - 1
            keys[i] = by * side + bx
            counts[keys[i] + 1] += 1
        for c in range(1, side * side + 1):
            counts[c] += counts[c - 1]
        order = np.empty(k, np.int64)
        fill = counts[:-1].copy()
        for i in range(k):
            order[fill[keys[i]]] = i
            fill[keys[i]] += 1
        flags = np.zeros(k + 1, np.bool_)
        ncolors = 1
        touched = np.empty(k, np.int64)
        for i in range(k):
            key = keys[i]
            cx = key % side
            cy = key // side
            ntouched = 0
            for oy in range(-1, 2):
                yy = cy + oy
                if yy < 0 or yy >= side:
                    continue
                x0 = cx - 1 if cx > 0 else 0
                x1 = cx + 1 if cx < side - 1 else side - 1
                for pos in range(counts[yy * side + x0], counts[yy * side + x1 + 1]):
                    j = order[pos]
                    cj = colors[j]
                    if cj < 0:
                        continue
                    dxa = tx[j, 0] - rx[i, 0]
                    dya = tx[j, 1] - rx[i, 1]
                    dxb = rx[j, 0] - tx[i, 0]
                    dyb = rx[j, 1] - tx[i, 1]
                    if (dxa * dxa + dya * dya < guard_sq * lens2[i]) or (
                        dxb * dxb + dyb * dyb < guard_sq * lens2[j]
                    ):
                        if not flags[cj]:
                            flags[cj] = True
                            touched[ntouched] = cj
                            ntouched += 1
            c = 0
            while flags[c]:
                c += 1
            for t in range(ntouched):
                flags[touched[t]] = False
            colors[i] = c
            if c + 1 > ncolors:
                ncolors = c + 1
        return colors, ncolors

    return kernel


_color_hops_jit = _make_color_hops_jit()


def build_adhoc_schedule(
    flowset: FlowSet, topo: Topology, cfg: NetworkConfig
) -> Schedule:
    """Schedule every routed ad-hoc hop exactly once per second.

    Conflicts are resolved separately within each edge-color slot (only
    hops sharing a slot can collide), so a node's mini-slot and channel
    may differ between its slots.  M is the worst slot's ceil(colors/C_A).
    """
    graph = flowset.graph
    ecolors, E = edge_color(graph)
    nh = graph.num_hops
    s = np.ones(nh, dtype=np.int64)  # 1-based color of each hop
    nv = 1
    if nh:
        tx_pos = topo.nodes[graph.hop_tx]
        rx_pos = topo.nodes[graph.hop_rx]
        order = np.argsort(ecolors, kind="stable")
        boundaries = np.flatnonzero(np.diff(ecolors[order])) + 1
        for chunk in np.split(order, boundaries):
            hcolors, k = color_concurrent_hops(tx_pos[chunk], rx_pos[chunk], cfg.delta)
            s[chunk] = hcolors + 1
            nv = max(nv, k)
    M = max(1, math.ceil(nv / cfg.C_A))
    mslot = np.ceil(s / cfg.C_A).astype(np.int64)
    channel = (s % cfg.C_A) + 1
    return Schedule(
        E=E,
        M=M,
        C_A=cfg.C_A,
        hop_tx=graph.hop_tx,
        hop_rx=graph.hop_rx,
        hop_flow=graph.hop_flow,
        hop_eslot=ecolors,
        hop_mslot=mslot,
        hop_channel=channel,
        vertex_colors_used=nv,
        bs_frame=build_bs_schedule_sigma1(cfg),
    )


def _make_audit_groups_jit():
    try:
        from numba import njit
    except ImportError:
        return None

    @njit(cache=True)
    def kernel(tx, rx, starts, sizes, delta):  # pragma: no cover - via wrapper
        bad = 0
        guard = 1.0 + delta
        for gidx in range(starts.shape[0]):
            size = sizes[gidx]
            if size < 2:
                continue
            st = starts[gidx]
            ok = True
            for a in range(st, st + size):
                la = math.sqrt(
                    (tx[a, 0] - rx[a, 0]) ** 2 + (tx[a, 1] - rx[a, 1]) ** 2
                )
                need = guard * la - 1e-12
                for b in range(st, st + size):
                    if a == b:
                        continue
                    d = math.sqrt(
                        (tx[b, 0] - rx[a, 0]) ** 2 + (tx[b, 1] - rx[a, 1]) ** 2
                    )
                    if d < need:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                bad += 1
        return bad

    return kernel


_audit_groups_jit = _make_audit_groups_jit()


@dataclass(frozen=True)
class AuditReport:
    feasible: bool
    half_duplex_violations: int
    interference_violations: int
    unserved_hops: int
    range_violations: int

    def __bool__(self) -> bool:
        return self.feasible


def audit_schedule(schedule: Schedule, topo: Topology, cfg: NetworkConfig, r: float) -> AuditReport:
    """Exhaustive feasibility audit of a generated schedule.

    Checks (a) no node appears twice within one edge-color slot, (b) every
    (edge-color slot, mini-slot, channel) concurrent set passes the
    guard-zone predicate, (c) every hop is in range and appears once.
    """
    nh = schedule.num_hops
    half_duplex = 0
    interference = 0
    out_of_range = 0
    if nh:
        # (a) both roles occupy the node for the whole edge-color slot
        keys = np.concatenate(
            [
                schedule.hop_tx * schedule.E + schedule.hop_eslot,
                schedule.hop_rx * schedule.E + schedule.hop_eslot,
            ]
        )
        half_duplex = int(len(keys) - len(np.unique(keys)))

        # (c) hop geometry
        hop_len = np.linalg.norm(
            topo.nodes[schedule.hop_tx] - topo.nodes[schedule.hop_rx], axis=1
        )
        out_of_range = int(np.count_nonzero(hop_len > r * (1 + 1e-9)))

        # (b) group hops by (eslot, mslot, channel) and test each set;
        # singleton groups are trivially feasible and skipped up front
        group = (
            schedule.hop_eslot * (schedule.M + 1) + schedule.hop_mslot
        ) * (schedule.C_A + 1) + schedule.hop_channel
        order = np.argsort(group, kind="stable")
        sorted_group = group[order]
        boundaries = np.flatnonzero(np.diff(sorted_group)) + 1
        sizes = np.diff(np.concatenate([[0], boundaries, [len(order)]]))
        starts = np.concatenate([[0], boundaries]).astype(np.int64)
        tx_pos = topo.nodes[schedule.hop_tx[order]]
        rx_pos = topo.nodes[schedule.hop_rx[order]]
        if _audit_groups_jit is not None and nh > 4096:
            interference = int(
                _audit_groups_jit(tx_pos, rx_pos, starts, sizes.astype(np.int64), cfg.delta)
            )
        else:
            for st, size in zip(starts, sizes):
                if size < 2:
                    continue
                sel = slice(st, st + size)
                if not is_concurrent_set_feasible(tx_pos[sel], rx_pos[sel], cfg.delta):
                    interference += 1
    feasible = half_duplex == 0 and interference == 0 and out_of_range == 0
    return AuditReport(
        feasible=feasible,
        half_duplex_violations=half_duplex,
        interference_violations=interference,
        unserved_hops=0,
        range_violations=out_of_range,
    )

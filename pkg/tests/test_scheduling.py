import math

import numpy as np
import pytest

from mcis.interference import build_interference_graph, graph_from_edges
from mcis.model import NetworkConfig
from mcis.routing import AD_HOC, Flow, FlowSet, RoutingGraph, assign_flows, effective_range
from mcis.scheduling import (
    assign_minislot,
    audit_schedule,
    build_adhoc_schedule,
    build_bs_schedule_sigma1,
    edge_color,
    vertex_color,
    vertex_color_geometric,
)
from mcis.topology import build_topology

from conftest import topo_from_points


def hops_graph(n, hops):
    tx = np.array([h[0] for h in hops], dtype=np.int64)
    rx = np.array([h[1] for h in hops], dtype=np.int64)
    return RoutingGraph(n=n, hop_tx=tx, hop_rx=rx, hop_flow=np.arange(len(hops)))


def assert_proper_edge_coloring(graph, colors):
    by_node = {}
    for h in range(graph.num_hops):
        for v in (int(graph.hop_tx[h]), int(graph.hop_rx[h])):
            key = (v, int(colors[h]))
            assert key not in by_node, f"node {v} sees color {colors[h]} twice"
            by_node[key] = h


def test_edge_color_star():
    graph = hops_graph(6, [(0, i) for i in range(1, 6)])
    colors, e = edge_color(graph)
    assert e == 5
    assert_proper_edge_coloring(graph, colors)


def test_edge_color_triangle():
    graph = hops_graph(3, [(0, 1), (1, 2), (2, 0)])
    colors, e = edge_color(graph)
    assert e == 3
    assert_proper_edge_coloring(graph, colors)


def test_edge_color_greedy_bound_random():
    rng = np.random.default_rng(0)
    for _ in range(60):
        n = int(rng.integers(4, 40))
        hops = [tuple(rng.choice(n, 2, replace=False)) for _ in range(int(rng.integers(1, 100)))]
        graph = hops_graph(n, hops)
        colors, e = edge_color(graph)
        assert_proper_edge_coloring(graph, colors)
        assert e <= max(1, 2 * graph.max_degree() - 1)


def complete_graph(k):
    u, v = zip(*[(i, j) for i in range(k) for j in range(i + 1, k)])
    return graph_from_edges(k, np.array(u), np.array(v), radius=1.0)


def test_vertex_color_clique_and_path():
    colors, k = vertex_color(complete_graph(4))
    assert k == 4
    path = graph_from_edges(3, np.array([0, 1]), np.array([1, 2]), radius=1.0)
    colors, k = vertex_color(path)
    assert k == 2


def test_vertex_color_greedy_bound_random_geometric():
    rng = np.random.default_rng(5)
    for _ in range(40):
        pts = rng.random((int(rng.integers(10, 200)), 2))
        graph = build_interference_graph(pts, r=float(rng.uniform(0.02, 0.12)), delta=1.0)
        colors, k = vertex_color(graph)
        assert k <= graph.max_degree() + 1
        for i in range(graph.n):
            for j in graph.neighbors(i):
                assert colors[i] != colors[j]


def test_vertex_color_geometric_matches_explicit():
    rng = np.random.default_rng(6)
    pts = rng.random((300, 2))
    r, delta = 0.05, 1.0
    radius = (2 + delta) * r
    graph = build_interference_graph(pts, r, delta)
    c1, k1 = vertex_color(graph)
    c2, k2 = vertex_color_geometric(pts, radius)
    assert k1 == k2
    assert np.array_equal(c1, c2)


def test_vertex_color_geometric_subset():
    rng = np.random.default_rng(8)
    pts = rng.random((100, 2))
    subset = np.arange(0, 100, 3)
    colors, k = vertex_color_geometric(pts, 0.2, subset=subset)
    assert (colors[subset] >= 0).all()
    mask = np.ones(100, bool)
    mask[subset] = False
    assert (colors[mask] == -1).all()


@pytest.mark.parametrize("s,ca,expect", [(1, 3, (1, 2)), (3, 3, (1, 1)), (6, 3, (2, 1))])
def test_assign_minislot_values(s, ca, expect):
    assert assign_minislot(s, ca) == expect


def test_assign_minislot_is_injective():
    for ca in (1, 2, 3, 7):
        seen = set()
        for s in range(1, 200):
            key = assign_minislot(s, ca)
            assert key not in seen
            seen.add(key)


def make_flowset(topo, routes, r):
    flows, tx, rx, fid = [], [], [], []
    for i, route in enumerate(routes):
        flows.append(Flow(i, route[0], route[-1], AD_HOC, tuple(route)))
        for a, b in zip(route[:-1], route[1:]):
            tx.append(a)
            rx.append(b)
            fid.append(i)
    graph = RoutingGraph(
        n=topo.n,
        hop_tx=np.asarray(tx, dtype=np.int64),
        hop_rx=np.asarray(rx, dtype=np.int64),
        hop_flow=np.asarray(fid, dtype=np.int64),
    )
    return FlowSet(
        flows=flows, graph=graph, r=r,
        node_load=np.zeros(topo.n, dtype=np.int64),
        line_counts=np.zeros(topo.g**2, dtype=np.int64),
        adhoc_count=len(flows), unrouted=0,
    )


def test_schedule_single_hop():
    topo = topo_from_points([[0.4, 0.5], [0.6, 0.5]], g=1)
    cfg = NetworkConfig(n=2, C=1, C_A=1, C_I=0, m=0, W=5.0, W_A=5.0, W_I=0.0, H=1, r=0.5)
    fs = make_flowset(topo, [(0, 1)], r=0.5)
    sched = build_adhoc_schedule(fs, topo, cfg)
    assert (sched.E, sched.M) == (1, 1)
    assert sched.num_hops == 1
    assert audit_schedule(sched, topo, cfg, 0.5).feasible


def test_two_interfering_flows_two_channels():
    # two 1-hop flows well inside each other's guard zone
    topo = topo_from_points([[0.40, 0.5], [0.45, 0.5], [0.50, 0.5], [0.55, 0.5]], g=1)
    cfg = NetworkConfig(n=4, C=2, C_A=2, C_I=0, m=0, W=1.0, W_A=1.0, W_I=0.0, H=1, r=0.1)
    fs = make_flowset(topo, [(0, 1), (2, 3)], r=0.1)
    sched = build_adhoc_schedule(fs, topo, cfg)
    assert sched.M == 1
    assert sched.hop_mslot.tolist() == [1, 1]
    assert sorted(sched.hop_channel.tolist()) == [1, 2]
    assert audit_schedule(sched, topo, cfg, 0.1).feasible


def test_two_interfering_flows_one_channel():
    topo = topo_from_points([[0.40, 0.5], [0.45, 0.5], [0.50, 0.5], [0.55, 0.5]], g=1)
    cfg = NetworkConfig(n=4, C=1, C_A=1, C_I=0, m=0, W=1.0, W_A=1.0, W_I=0.0, H=1, r=0.1)
    fs = make_flowset(topo, [(0, 1), (2, 3)], r=0.1)
    sched = build_adhoc_schedule(fs, topo, cfg)
    assert sched.M == 2
    assert sorted(sched.hop_mslot.tolist()) == [1, 2]
    assert set(sched.hop_channel.tolist()) == {1}
    assert audit_schedule(sched, topo, cfg, 0.1).feasible


def test_bs_frame_fairness_and_rates():
    cfg = NetworkConfig(n=100, b=64, C=18, C_A=1, C_I=17, m=18, W=35.0, W_A=1.0,
                        W_I=17.0, delta=1.0)
    frame = build_bs_schedule_sigma1(cfg)
    assert frame.k8 == 16 and frame.frame_len == 17
    # every BS-cell active exactly once per frame, slots within [0, k8]
    assert ((frame.cell_slot >= 0) & (frame.cell_slot < frame.frame_len)).all()
    for cluster in range(0, cfg.b, frame.frame_len):
        slots = frame.cell_slot[cluster : cluster + frame.frame_len]
        assert len(set(slots.tolist())) == len(slots)
    assert frame.per_cell_rate == pytest.approx(1.0)  # W_I/(k8+1), Ci<=m


def test_bs_frame_interface_limited_rate():
    cfg = NetworkConfig(n=100, b=4, C=9, C_A=1, C_I=8, m=4, W=33.0, W_A=1.0,
                        W_I=16.0, delta=1.0)
    frame = build_bs_schedule_sigma1(cfg)
    assert frame.per_cell_rate == pytest.approx((4 / 8) * 16.0 / 17.0)


def test_full_schedule_invariants(small_cfg):
    topo = build_topology(small_cfg)
    r = effective_range(small_cfg, topo)
    fs = assign_flows(topo, small_cfg, r)
    sched = build_adhoc_schedule(fs, topo, small_cfg)
    report = audit_schedule(sched, topo, small_cfg, r)
    assert report.feasible, report
    # every routed ad-hoc hop appears exactly once
    assert sched.num_hops == fs.graph.num_hops
    assert (sched.hop_channel >= 1).all() and (sched.hop_channel <= small_cfg.C_A).all()
    assert (sched.hop_mslot >= 1).all() and (sched.hop_mslot <= sched.M).all()
    assert sched.minislot_seconds == pytest.approx(1.0 / (sched.E * sched.M))


def test_entries_dump(small_cfg):
    topo = build_topology(small_cfg)
    fs = assign_flows(topo, small_cfg)
    sched = build_adhoc_schedule(fs, topo, small_cfg)
    rows = list(sched.entries())
    assert len(rows) == 2 * sched.num_hops
    node, eslot, mslot, channel, role, flow = rows[0]
    assert role == "tx" and rows[1][4] == "rx"


def test_schedule_csv_dump(small_cfg):
    topo = build_topology(small_cfg)
    fs = assign_flows(topo, small_cfg)
    sched = build_adhoc_schedule(fs, topo, small_cfg)
    text = sched.to_csv()
    lines = text.splitlines()
    assert lines[0] == "node,eslot,mslot,channel,role,flow"
    assert len(lines) == 2 * sched.num_hops + 1
    assert lines[1].split(",")[4] == "tx"


def test_bs_frame_single_cell_duty_cycle():
    cfg = NetworkConfig(n=10, b=1, C=2, C_A=1, C_I=1, m=2, W=3.0, W_A=1.0,
                        W_I=1.0, delta=1.0)
    frame = build_bs_schedule_sigma1(cfg)
    assert frame.frame_len == 17
    assert frame.cell_slot.tolist() == [0]
    assert frame.per_cell_rate == pytest.approx(cfg.W_I / 17.0)


try:
    from hypothesis import given, settings, strategies as st

    @settings(max_examples=200, deadline=None)
    @given(s=st.integers(1, 10**6), ca=st.integers(1, 64))
    def test_assign_minislot_roundtrip_property(s, ca):
        mslot, channel = assign_minislot(s, ca)
        assert 1 <= channel <= ca
        assert mslot == -(-s // ca)
        # the pair uniquely recovers s
        offset = (channel - 2) % ca
        assert (mslot - 1) * ca + offset + 1 == s
except ImportError:
    pass

"""The primary acceptance suite: ten checks tying the built system back to
the closed-form results at desk scale.

Each criterion function is self-contained, deterministic, and returns a
CriterionResult with the measured values; pytest and the CLI/service
``verify`` surface both run this registry and report one line per
criterion.  Scales and tolerances are fixed here, not configurable.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .bounds import Condition, average_delay, classify_condition, scah_config, scah_hop_limit
from .harness import batch_queue_delays, fit_scaling, run_trial, sweep_configs
from .interference import (
    build_interference_graph,
    interfering_cell_bound,
    interfering_cells,
)
from .model import NetworkConfig, connectivity_radius
from .routing import RoutingGraph, expected_hops, sample_destinations, simulate_hop_counts
from .scheduling import build_bs_schedule_sigma1, edge_color, vertex_color
from .topology import place_nodes

LN = math.log
PI = math.pi
MASTER_SEED = 20260810


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} {self.name}: {self.detail}"


def criterion_hop_count_law() -> tuple[bool, str]:
    """Monte-Carlo mean hop count at H=10 matches (4H^3+3H^2-H)/(6H^2) to 1%."""
    target = expected_hops(10)
    mean = simulate_hop_counts(10, 10**6, seed=MASTER_SEED)
    ok = abs(mean - target) <= 0.01 * target
    return ok, f"mc mean {mean:.4f} vs 7.15 (tol 1%)"


def _random_audit_config(rng: np.random.Generator, seed: int) -> NetworkConfig:
    c_a = int(rng.choice([1, 2, 4]))
    h = int(rng.choice([1, 2, 4]))
    n = int(rng.integers(200, 2001))
    delta = float(rng.choice([0.5, 1.0, 2.0]))
    w_a = float(rng.uniform(1.0, 6.0))
    if rng.random() < 0.5:
        w_i, c_i, m = float(rng.uniform(0.5, 3.0)), int(rng.choice([1, 2])), int(rng.choice([2, 4]))
    else:
        w_i, c_i, m = 0.0, 0, 0
    b = int(rng.choice([1, 4, 9]))
    return NetworkConfig(
        n=n, b=b, C=c_a + c_i, C_A=c_a, C_I=c_i, m=m,
        W=w_a + 2 * w_i, W_A=w_a, W_I=w_i, H=h, delta=delta, seed=seed,
    )


def criterion_schedule_feasibility(trials: int = 100) -> tuple[bool, str]:
    """Every generated schedule passes the full audit on random configs."""
    rng = np.random.default_rng(MASTER_SEED)
    violations = 0
    unrouted = 0
    for t in range(trials):
        res = run_trial(_random_audit_config(rng, seed=t), trial=t)
        if not res.feasible:
            violations += 1
        unrouted += res.unrouted
    ok = violations == 0
    return ok, f"{trials} configs, {violations} audit failures, {unrouted} unroutable flows"


def criterion_interfering_cells() -> tuple[bool, str]:
    """Measured interfering-cell counts never exceed ceil(4(1+delta)^2)."""
    rng = np.random.default_rng(MASTER_SEED)
    worst = []
    ok = True
    for delta in (0.5, 1.0, 2.0):
        bound = interfering_cell_bound(delta)
        top = 0
        for _ in range(50):
            g = int(rng.integers(2, 64))
            cell = int(rng.integers(0, g * g))
            count = len(interfering_cells(cell, g, delta))
            top = max(top, count)
            if count > bound:
                ok = False
        worst.append(f"d={delta}: {top}<={bound}")
    return ok, "; ".join(worst)


def criterion_coloring_bounds(instances: int = 200) -> tuple[bool, str]:
    """Greedy colorings respect maxdeg+1 (vertex) and 2*maxdeg-1 (edge)."""
    rng = np.random.default_rng(MASTER_SEED)
    ok = True
    worst_v = worst_e = 0.0
    for _ in range(instances):
        # vertex side: random geometric conflict graph
        pts = rng.random((int(rng.integers(10, 150)), 2))
        graph = build_interference_graph(pts, float(rng.uniform(0.02, 0.15)), 1.0)
        colors, k = vertex_color(graph)
        cap = graph.max_degree() + 1
        worst_v = max(worst_v, k / cap)
        for i in range(graph.n):
            nbr = graph.neighbors(i)
            if len(nbr) and (colors[nbr] == colors[i]).any():
                ok = False
        if k > cap:
            ok = False
        # edge side: random hop multigraph
        nn = int(rng.integers(5, 60))
        nh = int(rng.integers(1, 160))
        tx = rng.integers(0, nn, nh)
        off = rng.integers(1, nn, nh)
        g2 = RoutingGraph(n=nn, hop_tx=tx, hop_rx=(tx + off) % nn, hop_flow=np.arange(nh))
        ecolors, e = edge_color(g2)
        ecap = max(1, 2 * g2.max_degree() - 1)
        worst_e = max(worst_e, e / ecap)
        if e > ecap:
            ok = False
        seen = set()
        for h in range(nh):
            for v in (int(g2.hop_tx[h]), int(g2.hop_rx[h])):
                if (v, int(ecolors[h])) in seen:
                    ok = False
                seen.add((v, int(ecolors[h])))
    return ok, f"{instances} graphs; worst vertex fill {worst_v:.2f}, edge fill {worst_e:.2f}"


def criterion_sigma1_exactness() -> tuple[bool, str]:
    """T_I under the BS frame equals the closed form to 1e-9 relative."""
    cases = [
        (1, 2, 2, 17.0, 1.0),
        (4, 4, 2, 3.0, 1.0),     # C_I > m
        (16, 4, 4, 8.0, 0.5),
        (64, 6, 2, 5.0, 2.0),    # C_I > m
        (9, 2, 1, 4.0, 1.0),
    ]
    worst = 0.0
    for b, m, c_i, w_i, delta in cases:
        cfg = NetworkConfig(
            n=100, b=b, C=1 + c_i, C_A=1, C_I=c_i, m=m,
            W=1.0 + 2 * w_i, W_A=1.0, W_I=w_i, H=2, delta=delta,
        )
        frame = build_bs_schedule_sigma1(cfg)
        k8 = interfering_cell_bound(delta)
        expect = b * w_i / (k8 + 1) if c_i <= m else b * (m / c_i) * w_i / (k8 + 1)
        measured = b * frame.per_cell_rate
        worst = max(worst, abs(measured - expect) / expect)
    return worst <= 1e-9, f"{len(cases)} cases, worst rel err {worst:.2e}"


def criterion_scah_reduction() -> tuple[bool, str]:
    """Formula ratio flat within 10% and measured sweep slope in [-0.65, -0.45]."""
    ratios = []
    for n in (10**4, 10**5, 10**6):
        h = scah_hop_limit(n)
        bound = n * 1.0 / (h**3 * LN(n) ** 2)
        ratios.append(bound / (1.0 / math.sqrt(n * LN(n))))
    flat = max(ratios) / min(ratios) <= 1.10
    configs = [scah_config(2**k, W=1.0, seed=1) for k in range(12, 17)]
    results, failures = sweep_configs(configs)
    if failures or any(not r.feasible for r in results):
        return False, f"sweep had {len(failures)} failures"
    fit = fit_scaling([(r.cfg.n, r.lambda_min) for r in results])
    ok = flat and -0.65 <= fit.slope <= -0.45
    return ok, (
        f"ratio spread {max(ratios) / min(ratios):.4f} (<=1.10), "
        f"slope {fit.slope:.3f} in [-0.65,-0.45], r2 {fit.r2:.3f}"
    )


def criterion_delay_gain() -> tuple[bool, str]:
    """min(C_I, m) parallel interfaces cut saturated delay 4x; mixture formula value."""
    packets = 500
    ratio = float(
        batch_queue_delays(packets, 4, 1.0).mean() / batch_queue_delays(packets, 1, 1.0).mean()
    )
    d = average_delay(10**6, 10, 1.0, 4, 4)
    ok = abs(ratio - 0.25) <= 0.05 and abs(d - 0.29232) <= 1e-4
    return ok, f"queue ratio {ratio:.4f} (0.25 +/- 0.05), delay {d:.5f} (0.29232 +/- 1e-4)"


def criterion_concentration(seeds: int = 100) -> tuple[bool, str]:
    """Ad-hoc source count near pi*H^2*ln n; cell occupancy within [1/4, 4]x."""
    n, h = 10**5, 3
    # the count matches pi H^2 ln n when r^2 = ln n / n
    r = connectivity_radius(n, margin=math.sqrt(PI))
    target = PI * h * h * LN(n)
    hits = 0
    for seed in range(seeds):
        pts = place_nodes(NetworkConfig(n=n, seed=seed))
        dst = sample_destinations(n, seed)
        dist = np.linalg.norm(pts - pts[dst], axis=1)
        count = int((dist <= h * r).sum())
        if abs(count - target) <= 0.20 * target:
            hits += 1
    source_ok = hits >= int(0.95 * seeds)

    occ_ok = True
    occ_note = []
    for nn in (10**4, 10**5):
        a = 100.0 * LN(nn) / nn  # above the 50 ln n / n density premise
        g = max(1, round(1.0 / math.sqrt(a)))
        expect = nn / (g * g)
        good = 0
        for seed in range(seeds):
            pts = place_nodes(NetworkConfig(n=nn, seed=seed))
            idx = np.minimum((pts * g).astype(np.int64), g - 1)
            occ = np.bincount(idx[:, 1] * g + idx[:, 0], minlength=g * g)
            if occ.min() >= 0.25 * expect and occ.max() <= 4.0 * expect:
                good += 1
        occ_note.append(f"n={nn}: {good}/{seeds}")
        if good < int(0.95 * seeds):
            occ_ok = False
    return source_ok and occ_ok, (
        f"sources within 20% in {hits}/{seeds} seeds; occupancy " + ", ".join(occ_note)
    )


def criterion_dest_flow_max() -> tuple[bool, str]:
    """Max flows per destination tracks ln N / lnln N across two decades."""
    rng = np.random.default_rng(MASTER_SEED)
    trials = 25
    ratios = []
    for n_active in (10**3, 10**4, 10**5):
        maxima = []
        for _ in range(trials):
            dst = rng.integers(0, n_active, n_active)
            maxima.append(int(np.bincount(dst).max()))
        ref = LN(n_active) / LN(LN(n_active))
        ratios.append(float(np.mean(maxima)) / ref)
    spread = max(ratios) / min(ratios)
    return spread < 2.0, f"ratios {[f'{x:.2f}' for x in ratios]}, spread {spread:.2f} < 2"


def criterion_classifier_fixtures() -> tuple[bool, str]:
    """The three worked classification examples reproduce exactly."""
    fixtures = [
        (10**6, 4, 5, 1, 1, Condition.INTERFACE_BOTTLENECK),
        (10**6, 4, 50, 1, 2, Condition.CONNECTIVITY),
        (10**6, 100, 10, 2, 3, Condition.INTERFACE_BOTTLENECK),
    ]
    for n, c_a, h, case, sub, cond in fixtures:
        cls = classify_condition(n, c_a, h)
        if (cls.case, cls.sub_case, cls.condition) != (case, sub, cond):
            return False, f"mismatch at (n={n}, C_A={c_a}, H={h}): got {cls}"
    return True, "3/3 fixtures exact"


CRITERIA = [
    (1, "hop-count law", criterion_hop_count_law),
    (2, "schedule feasibility", criterion_schedule_feasibility),
    (3, "interfering-cell constant", criterion_interfering_cells),
    (4, "coloring bounds", criterion_coloring_bounds),
    (5, "BS frame exactness", criterion_sigma1_exactness),
    (6, "single-channel ad-hoc reduction", criterion_scah_reduction),
    (7, "delay gain", criterion_delay_gain),
    (8, "concentration", criterion_concentration),
    (9, "destination flow maximum", criterion_dest_flow_max),
    (10, "classifier fixtures", criterion_classifier_fixtures),
]


def run_primary(numbers: list[int] | None = None) -> list[CriterionResult]:
    """Run the selected criteria (all by default), in order."""
    wanted = set(numbers) if numbers else None
    out = []
    for number, name, fn in CRITERIA:
        if wanted is not None and number not in wanted:
            continue
        t0 = time.time()
        passed, detail = fn()
        out.append(CriterionResult(number, name, passed, detail, time.time() - t0))
    return out

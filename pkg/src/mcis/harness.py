"""Monte-Carlo experiment runner: build, schedule, audit, measure, persist.

A trial is fully determined by (config, seed): topology -> flows -> TDMA
schedule -> feasibility audit -> throughput and delay measurements.  Sweeps
run trials over a parameter grid x seed list and emit one fixed-schema CSV
row per trial; fit_scaling turns (n, value) columns into log-log slopes.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import classify_condition
from .model import DomainError, NetworkConfig, validate_config
from .routing import AD_HOC, FlowSet, assign_flows, effective_range
from .scheduling import AuditReport, Schedule, audit_schedule, build_adhoc_schedule
from .topology import Topology, build_topology

# One ad-hoc hop of delay expressed in seconds, the documented conversion
# between hop units and the infrastructure queue's service seconds.
HOP_SECONDS = 1.0

RESULT_HEADER = (
    "trial,seed,n,b,C_A,C_I,m,H,W_A,W_I,delta,lambda_min,lambda_mean,T_A,T_I,D,"
    "adhoc_sources,max_dest_flows,max_lines_cell,edge_colors,vertex_colors,condition"
).split(",")


@dataclass(frozen=True)
class ThroughputReport:
    per_flow: np.ndarray      # bits/sec per flow id (0 for unserved)
    lambda_min: float         # min over served flows
    lambda_mean: float        # mean over all flows
    T_A: float                # sum of served ad-hoc flow rates
    T_I: float                # BS frame capacity b * per-cell rate
    infra_served: float       # demand-side sum of infrastructure flow rates


@dataclass(frozen=True)
class DelayReport:
    adhoc_mean_hops: float
    infra_mean_seconds: float
    combined_seconds: float


def measure_throughput(schedule: Schedule, flowset: FlowSet, cfg: NetworkConfig) -> ThroughputReport:
    """Per-flow rates under the constructed schedule.

    Every scheduled ad-hoc hop owns one mini-slot per second, so a routed
    ad-hoc flow carries W_A/(C_A*E*M).  An infrastructure flow gets a
    round-robin share of its uplink and downlink BS-cells' frame rate.
    T_I reports the frame's saturation capacity (criteria compare it to
    b*W_I/(k8+1) exactly); the demand-limited sum is infra_served.
    """
    nflows = len(flowset.flows)
    rates = np.zeros(nflows)
    adhoc_rate = cfg.W_A / (cfg.C_A * schedule.E * schedule.M)
    frame = schedule.bs_frame
    up_count = np.zeros(cfg.b, dtype=np.int64)
    down_count = np.zeros(cfg.b, dtype=np.int64)
    for f in flowset.flows:
        if f.mode != AD_HOC:
            up_count[f.bs_up] += 1
            down_count[f.bs_down] += 1
    served = np.zeros(nflows, dtype=bool)
    for f in flowset.flows:
        if f.mode == AD_HOC:
            if f.route is not None:
                rates[f.id] = adhoc_rate
                served[f.id] = True
        else:
            if frame.per_cell_rate > 0:
                rates[f.id] = min(
                    frame.per_cell_rate / up_count[f.bs_up],
                    frame.per_cell_rate / down_count[f.bs_down],
                )
            served[f.id] = True
    t_a = float(rates[[f.id for f in flowset.flows if f.mode == AD_HOC]].sum())
    infra_ids = [f.id for f in flowset.flows if f.mode != AD_HOC]
    return ThroughputReport(
        per_flow=rates,
        lambda_min=float(rates[served].min()) if served.any() else 0.0,
        lambda_mean=float(rates.mean()) if nflows else 0.0,
        T_A=t_a,
        T_I=cfg.b * frame.per_cell_rate,
        infra_served=float(rates[infra_ids].sum()) if infra_ids else 0.0,
    )


def batch_queue_delays(num_packets: int, servers: int, service: float) -> np.ndarray:
    """Completion times of a batch of packets arriving together at a
    deterministic-service multi-server queue (FIFO)."""
    if servers < 1:
        raise DomainError(f"need >= 1 server, got {servers}")
    i = np.arange(num_packets)
    return service * (i // servers + 1.0)


def measure_delay(flowset: FlowSet, cfg: NetworkConfig) -> DelayReport:
    """Ad-hoc delay in hop units; infrastructure delay from per-BS queues.

    Each infrastructure flow deposits one packet at its uplink base station;
    the station serves them FIFO with min(C_I, m) parallel interfaces and
    deterministic service time c_service.  The combined average converts
    hops at HOP_SECONDS per hop.
    """
    adhoc_hops = [f.hops for f in flowset.flows if f.mode == AD_HOC and f.route is not None]
    per_bs: dict[int, int] = {}
    for f in flowset.flows:
        if f.mode != AD_HOC:
            per_bs[f.bs_up] = per_bs.get(f.bs_up, 0) + 1
    infra_delays: list[float] = []
    if per_bs and cfg.infrastructure_enabled:
        # W_I=0 means those flows are unservable; they are excluded from the
        # average rather than assigned an infinite delay
        servers = min(cfg.C_I, cfg.m)
        if servers < 1:
            raise DomainError("infrastructure flows present but min(C_I, m) = 0")
        for count in per_bs.values():
            infra_delays.extend(batch_queue_delays(count, servers, cfg.c_service))
    total = len(adhoc_hops) + len(infra_delays)
    combined = (
        float(sum(adhoc_hops) * HOP_SECONDS + sum(infra_delays)) / total if total else math.nan
    )
    return DelayReport(
        adhoc_mean_hops=float(np.mean(adhoc_hops)) if adhoc_hops else math.nan,
        infra_mean_seconds=float(np.mean(infra_delays)) if infra_delays else math.nan,
        combined_seconds=combined,
    )


@dataclass(frozen=True)
class ExperimentResult:
    trial: int
    cfg: NetworkConfig
    r_used: float
    lambda_min: float
    lambda_mean: float
    T_A: float
    T_I: float
    D: float
    adhoc_sources: int
    max_dest_flows: int
    max_lines_cell: int
    edge_colors: int
    vertex_colors: int
    condition: str
    feasible: bool
    unrouted: int
    infra_served: float
    adhoc_mean_hops: float
    infra_mean_delay: float
    audit: AuditReport = field(repr=False, compare=False, default=None)

    def to_dict(self) -> dict:
        """Flat typed mapping: the CSV columns plus non-schema extras."""
        c = self.cfg
        out = {
            "trial": self.trial, "seed": c.seed, "n": c.n, "b": c.b,
            "C_A": c.C_A, "C_I": c.C_I, "m": c.m, "H": c.H,
            "W_A": c.W_A, "W_I": c.W_I, "delta": c.delta,
            "lambda_min": self.lambda_min, "lambda_mean": self.lambda_mean,
            "T_A": self.T_A, "T_I": self.T_I, "D": self.D,
            "adhoc_sources": self.adhoc_sources,
            "max_dest_flows": self.max_dest_flows,
            "max_lines_cell": self.max_lines_cell,
            "edge_colors": self.edge_colors, "vertex_colors": self.vertex_colors,
            "condition": self.condition,
            "r_used": self.r_used, "feasible": self.feasible,
            "unrouted": self.unrouted, "infra_served": self.infra_served,
        }
        return out

    def to_row(self) -> list:
        d = self.to_dict()
        return [_fmt(d[key]) for key in RESULT_HEADER]


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class TrialError(RuntimeError):
    """A trial failed; carries the offending config."""

    def __init__(self, cfg: NetworkConfig, cause: Exception):
        super().__init__(f"trial failed for n={cfg.n} seed={cfg.seed}: {cause}")
        self.cfg = cfg
        self.cause = cause


def run_trial(cfg: NetworkConfig, trial: int = 0) -> ExperimentResult:
    """Execute one full build-schedule-audit-measure pipeline."""
    cfg = validate_config(cfg)
    topo = build_topology(cfg)
    r = effective_range(cfg, topo)
    flowset = assign_flows(topo, cfg, r)
    schedule = build_adhoc_schedule(flowset, topo, cfg)
    audit = audit_schedule(schedule, topo, cfg, r)
    thr = measure_throughput(schedule, flowset, cfg)
    dly = measure_delay(flowset, cfg)
    try:
        condition = classify_condition(cfg.n, cfg.C_A, cfg.H).condition.value
    except DomainError:
        condition = "undefined"
    return ExperimentResult(
        trial=trial,
        cfg=cfg,
        r_used=r,
        lambda_min=thr.lambda_min,
        lambda_mean=thr.lambda_mean,
        T_A=thr.T_A,
        T_I=thr.T_I,
        D=dly.combined_seconds,
        adhoc_sources=flowset.adhoc_count,
        max_dest_flows=flowset.max_dest_flows(),
        max_lines_cell=int(flowset.line_counts.max()) if len(flowset.line_counts) else 0,
        edge_colors=schedule.E,
        vertex_colors=schedule.vertex_colors_used,
        condition=condition,
        feasible=audit.feasible,
        unrouted=flowset.unrouted,
        infra_served=thr.infra_served,
        adhoc_mean_hops=dly.adhoc_mean_hops,
        infra_mean_delay=dly.infra_mean_seconds,
        audit=audit,
    )


def _run_indexed(args: tuple[int, NetworkConfig]):
    trial, cfg = args
    try:
        return run_trial(cfg, trial), None
    except Exception as exc:  # noqa: BLE001 - per-trial isolation
        return None, TrialError(cfg, exc)


def sweep_configs(
    configs: list[NetworkConfig], workers: int = 1
) -> tuple[list[ExperimentResult], list[TrialError]]:
    """Run prepared configs as trials 0..k-1; failures recorded, not fatal.

    Results come back in trial order regardless of worker count.
    """
    jobs = list(enumerate(configs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_indexed, jobs, chunksize=1))
    else:
        outcomes = [_run_indexed(job) for job in jobs]
    results = [res for res, err in outcomes if res is not None]
    failures = [err for res, err in outcomes if err is not None]
    return results, failures


def sweep(
    base: NetworkConfig,
    vary: list[tuple[str, list]],
    seeds: list[int],
    workers: int = 1,
    adapt=None,
) -> tuple[list[ExperimentResult], list[TrialError]]:
    """Cartesian sweep over ``vary`` parameter values x seeds.

    ``adapt(cfg) -> cfg`` runs after each override, for coupled parameters
    (e.g. recomputing H when n changes).
    """
    keys = [k for k, _ in vary]
    value_lists = [v for _, v in vary]
    configs = []
    for combo in itertools.product(*value_lists) if keys else [()]:
        for seed in seeds:
            cfg = base.with_overrides(**dict(zip(keys, combo)), seed=seed)
            if adapt is not None:
                cfg = adapt(cfg)
            configs.append(cfg)
    return sweep_configs(configs, workers)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float


def fit_scaling(points: list[tuple[float, float]]) -> FitResult:
    """Ordinary least squares on (ln x, ln y); r2 = 1 for a perfect fit."""
    if len(points) < 3:
        raise DomainError(f"need >= 3 points to fit, got {len(points)}")
    xs = np.asarray([p[0] for p in points], dtype=float)
    ys = np.asarray([p[1] for p in points], dtype=float)
    if (xs <= 0).any() or (ys <= 0).any():
        raise DomainError("fit_scaling needs strictly positive coordinates")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float((resid**2).sum())
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return FitResult(slope=float(slope), intercept=float(intercept), r2=r2)


# --- CSV persistence ---------------------------------------------------------


def row_from_dict(d: dict) -> list[str]:
    """Schema-ordered CSV row text from a result mapping (shortest-round-trip
    float formatting)."""
    return [_fmt(d[key]) for key in RESULT_HEADER]


def dicts_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_HEADER)
    for d in rows:
        writer.writerow(row_from_dict(d))
    return buf.getvalue()


def results_to_csv(results: list[ExperimentResult]) -> str:
    """Persisted results must have passed the schedule audit."""
    bad = [res.trial for res in results if not res.feasible]
    if bad:
        raise DomainError(f"refusing to persist infeasible trials {bad}")
    return dicts_to_csv([res.to_dict() for res in results])


def write_results_csv(results: list[ExperimentResult], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(results_to_csv(results))


def read_results_csv(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))

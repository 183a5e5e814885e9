"""HTTP service over the toolkit: classification, bounds, topology dumps,
trials, sweeps, scaling fits, and the acceptance suite.

The CLI is a thin client of this app (in-process by default); all request
and response shapes are pydantic models so remote callers get the same
contracts.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .acceptance import run_primary
from .bounds import classify_condition, evaluate_bounds, scah_hop_limit
from .harness import RESULT_HEADER, fit_scaling, run_trial, sweep
from .model import CONFIG_KEYS, ConfigError, DomainError, NetworkConfig, validate_config
from .model import _INT_KEYS as INT_KEYS
from .routing import effective_range
from .topology import build_topology, cells_of

CONDITION_LABELS = {
    "connectivity": "Connectivity",
    "interference": "Interference",
    "destination-bottleneck": "DestinationBottleneck",
    "interface-bottleneck": "InterfaceBottleneck",
}


class ConfigPayload(BaseModel):
    n: int = 100
    b: int = 4
    C: int = 2
    C_A: int = 1
    C_I: int = 1
    m: int = 2
    W: float = 2.0
    W_A: float = 1.0
    W_I: float = 0.5
    H: int = 2
    delta: float = 1.0
    r: float | None = None
    seed: int = 0
    c_service: float = 1.0

    def to_config(self) -> NetworkConfig:
        return validate_config(NetworkConfig(**self.model_dump()))


class ClassifyRequest(BaseModel):
    n: int
    C_A: int
    H: int


class ClassifyResponse(BaseModel):
    case: int
    sub_case: int
    condition: str
    label: str
    thresholds: dict[str, float]


class BoundsResponse(BaseModel):
    condition: str
    case: int
    sub_case: int
    lambda_a: float
    T_A: float
    T_I: float
    lam: float = Field(description="per-node throughput, T_A/n plus the BS term")
    D: float | None
    thresholds: dict[str, float]


class TopologyRow(BaseModel):
    kind: str
    x: float
    y: float
    cell: int
    bscell: int


class TopologyResponse(BaseModel):
    g: int
    b0: int
    a_requested: float
    a_cell: float
    r_effective: float
    rows: list[TopologyRow]


class SimulateRequest(BaseModel):
    config: ConfigPayload = ConfigPayload()
    trial: int = 0


class SweepRequest(BaseModel):
    config: ConfigPayload = ConfigPayload()
    vary: list[tuple[str, list[float | int]]] = []
    seeds: list[int] = [0]
    workers: int = 1
    preset: str | None = None  # "scah" recomputes H from n


class SweepResponse(BaseModel):
    header: list[str]
    rows: list[dict]
    failures: list[str]


class FitRequest(BaseModel):
    points: list[tuple[float, float]]


class FitResponse(BaseModel):
    slope: float
    intercept: float
    r2: float


class VerifyRequest(BaseModel):
    criteria: list[int] | None = None


class CriterionRow(BaseModel):
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float


class VerifyResponse(BaseModel):
    results: list[CriterionRow]
    all_passed: bool


def create_app() -> FastAPI:
    app = FastAPI(title="mcis", version=__version__)

    @app.exception_handler(ConfigError)
    async def _config_error(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(DomainError)
    async def _domain_error(request, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/classify", response_model=ClassifyResponse)
    def classify(req: ClassifyRequest) -> ClassifyResponse:
        cls = classify_condition(req.n, req.C_A, req.H)
        return ClassifyResponse(
            case=cls.case,
            sub_case=cls.sub_case,
            condition=cls.condition.value,
            label=CONDITION_LABELS[cls.condition.value],
            thresholds=cls.thresholds,
        )

    @app.post("/bounds", response_model=BoundsResponse)
    def bounds(req: ConfigPayload) -> BoundsResponse:
        cfg = req.to_config()
        rep = evaluate_bounds(cfg)
        d = rep.D if rep.D == rep.D else None  # NaN -> null
        return BoundsResponse(
            condition=rep.condition.value,
            case=rep.case,
            sub_case=rep.sub_case,
            lambda_a=rep.lambda_a,
            T_A=rep.T_A,
            T_I=rep.T_I,
            lam=rep.lam,
            D=d,
            thresholds=rep.thresholds,
        )

    @app.post("/topology", response_model=TopologyResponse)
    def topology(req: ConfigPayload) -> TopologyResponse:
        cfg = req.to_config()
        topo = build_topology(cfg)
        rows = [
            TopologyRow(
                kind="node",
                x=float(x),
                y=float(y),
                cell=int(c),
                bscell=int(bc),
            )
            for (x, y), c, bc in zip(topo.nodes, topo.node_cell, topo.node_bscell)
        ]
        bs_cells = cells_of(topo.bs, topo.g)
        bs_bscells = cells_of(topo.bs, topo.b0)
        rows += [
            TopologyRow(kind="bs", x=float(x), y=float(y), cell=int(c), bscell=int(bc))
            for (x, y), c, bc in zip(topo.bs, bs_cells, bs_bscells)
        ]
        return TopologyResponse(
            g=topo.g,
            b0=topo.b0,
            a_requested=topo.a_requested,
            a_cell=topo.a_cell,
            r_effective=effective_range(cfg, topo),
            rows=rows,
        )

    @app.post("/simulate")
    def simulate(req: SimulateRequest) -> dict:
        cfg = req.config.to_config()
        return run_trial(cfg, req.trial).to_dict()

    @app.post("/sweep", response_model=SweepResponse)
    def do_sweep(req: SweepRequest) -> SweepResponse:
        cfg = req.config.to_config()
        adapt = None
        if req.preset == "scah":
            adapt = lambda c: c.with_overrides(H=scah_hop_limit(c.n))  # noqa: E731
        elif req.preset is not None:
            raise DomainError(f"unknown preset {req.preset!r}")
        vary = []
        for key, vals in req.vary:
            if key not in CONFIG_KEYS:
                raise DomainError(f"unknown sweep parameter {key!r}")
            vary.append((key, [int(v) if key in INT_KEYS else float(v) for v in vals]))
        results, failures = sweep(cfg, vary, req.seeds, workers=req.workers, adapt=adapt)
        return SweepResponse(
            header=list(RESULT_HEADER),
            rows=[r.to_dict() for r in results],
            failures=[str(f) for f in failures],
        )

    @app.post("/fit", response_model=FitResponse)
    def fit(req: FitRequest) -> FitResponse:
        res = fit_scaling(list(req.points))
        return FitResponse(slope=res.slope, intercept=res.intercept, r2=res.r2)

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        results = run_primary(req.criteria)
        rows = [
            CriterionRow(
                number=r.number,
                name=r.name,
                passed=r.passed,
                detail=r.detail,
                elapsed=r.elapsed,
            )
            for r in results
        ]
        return VerifyResponse(results=rows, all_passed=all(r.passed for r in results))

    return app


app = create_app()

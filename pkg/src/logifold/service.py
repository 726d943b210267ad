"""FastAPI service exposing compilation, combination, and the exact-measure
verifier.  The CLI is a thin client of these endpoints; payloads mirror the
on-disk file formats of ``model_io``.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import ensemble, model_io, theory
from .errors import LogifoldError
from .llg_core import DiscoveryConfig, compile_mlp, graph_to_jsonable


class LayerModel(BaseModel):
    weights: list[list[float]]
    bias: list[float]
    activation: str = "relu"


class MlpModel(BaseModel):
    input_dim: int
    head: str = "index-max"
    layers: list[LayerModel]


class DiscoveryModel(BaseModel):
    enum_width_cap: int = 12
    sample_count: int = 100_000
    seed: int = 0
    sample_scale: float = 3.0
    max_regions: int = 100_000


class CompileRequest(BaseModel):
    mlp: MlpModel
    discovery: DiscoveryModel = Field(default_factory=DiscoveryModel)


class CompileResponse(BaseModel):
    graph: dict
    num_vertices: int
    num_sinks: int
    num_arrows: int
    first_level_chambers: int
    seed: int


class PredictionsModel(BaseModel):
    model_id: str
    labels: list[str]
    instance_ids: list[str]
    rows: list[list[float]]


class TruthModel(BaseModel):
    instance_ids: list[str]
    labels: list[str]


class RoutingModel(BaseModel):
    filter: str
    coarse_map: dict[str, str]


class CombineRequest(BaseModel):
    predictions: list[PredictionsModel]
    truth: TruthModel
    ladder: list[float] | None = None
    routing: RoutingModel | None = None


class TableRowModel(BaseModel):
    threshold: float
    acc_refined: float
    acc_certain: float
    n_certain: int


class CombineResponse(BaseModel):
    rows: list[TableRowModel]
    simple_average: float
    majority_vote: float
    tsv: str


class TheoryRequest(BaseModel):
    n: int = Field(ge=1)
    k: int
    depth: int = 8
    mode: str = "auto"
    budget: int = 200_000
    restarts: int = 500
    seed: int = 0
    families: int = 200
    family_seed: int = 0


class TheoryResponse(BaseModel):
    max_agreement: str
    max_agreement_float: float
    floor_l: int
    claimed_bound: str
    claimed_bound_respected: bool
    tail_bound: str
    tail_bound_respected: bool
    families_checked: int
    families_applicable: int
    families_passed: int
    text: str


app = FastAPI(title="logifold", version="0.1.0")


@app.exception_handler(LogifoldError)
async def _logifold_error(request: Request, exc: LogifoldError):
    return JSONResponse(status_code=422,
                        content={"error": type(exc).__name__, "detail": str(exc)})


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError):
    return JSONResponse(status_code=422,
                        content={"error": "ValueError", "detail": str(exc)})


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/compile", response_model=CompileResponse)
def compile_endpoint(req: CompileRequest) -> CompileResponse:
    mlp = model_io.mlp_from_dict(req.mlp.model_dump())
    cfg = DiscoveryConfig(**req.discovery.model_dump())
    graph = compile_mlp(mlp, cfg)
    first_level = len(graph.out_arrows.get(graph.source, {}))
    n_arrows = sum(len(a) for a in graph.out_arrows.values())
    return CompileResponse(
        graph=graph_to_jsonable(graph),
        num_vertices=graph.num_vertices,
        num_sinks=len(graph.sinks),
        num_arrows=n_arrows,
        first_level_chambers=first_level,
        seed=cfg.seed,
    )


def _build_logifold(req: CombineRequest) -> ensemble.Logifold:
    filter_id = req.routing.filter if req.routing else None
    charts = []
    for pm in req.predictions:
        matrix = model_io.PredictionMatrix(
            model_id=pm.model_id, vocab=pm.labels,
            instance_ids=pm.instance_ids,
            rows=np.array(pm.rows, dtype=float).reshape(len(pm.instance_ids),
                                                        len(pm.labels)),
        )
        role = "filter" if pm.model_id == filter_id else "plain"
        charts.append(ensemble.Chart(id=pm.model_id, vocab=pm.labels,
                                     source=matrix, role=role))
    global_labels = model_io.union_label_space(
        [c.vocab for c in charts if c.role != "filter"])
    ladder = (ensemble.ThresholdLadder(req.ladder) if req.ladder
              else ensemble.ThresholdLadder.default())
    lf = ensemble.Logifold(charts=charts, global_labels=global_labels,
                           ladder=ladder)
    if req.routing:
        lf = ensemble.specialize_routing(lf, req.routing.filter,
                                         req.routing.coarse_map)
    return lf


@app.post("/combine", response_model=CombineResponse)
def combine_endpoint(req: CombineRequest) -> CombineResponse:
    lf = _build_logifold(req)
    truth = model_io.GroundTruth(instance_ids=req.truth.instance_ids,
                                 labels=req.truth.labels)
    rows, simple_acc, majority_acc = ensemble.evaluate_table(lf, truth)
    return CombineResponse(
        rows=[TableRowModel(threshold=r.threshold, acc_refined=r.acc_refined,
                            acc_certain=r.acc_certain, n_certain=r.n_certain)
              for r in rows],
        simple_average=simple_acc,
        majority_vote=majority_acc,
        tsv=ensemble.format_table(rows, simple_acc, majority_acc),
    )


@app.post("/theory", response_model=TheoryResponse)
def theory_endpoint(req: TheoryRequest) -> TheoryResponse:
    cfg = theory.SearchConfig(depth=req.depth, mode=req.mode,
                              budget=req.budget, restarts=req.restarts,
                              seed=req.seed)
    rep = theory.theory_report(req.n, req.k, cfg, n_families=req.families,
                               family_seed=req.family_seed)
    return TheoryResponse(
        max_agreement=str(rep["max_agreement"]),
        max_agreement_float=float(rep["max_agreement"]),
        floor_l=rep["floor_L"],
        claimed_bound=str(rep["claimed_bound"]),
        claimed_bound_respected=rep["claimed_bound_respected"],
        tail_bound=str(rep["tail_bound"]),
        tail_bound_respected=rep["tail_bound_respected"],
        families_checked=rep["families_checked"],
        families_applicable=rep["families_applicable"],
        families_passed=rep["families_passed"],
        text=theory.format_theory_report(rep),
    )

"""Pydantic request/response models for the HTTP service.

Wire conventions: knots are ``{"vertices": [[x, y, z], ...]}`` with the
index order as labelling; isotopies are ``{"times": [...], "keyframes":
[knot, ...]}``.  Infinite values (disconnected diagram distance, missing
chord candidates) are transported as ``null``.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .. import calibration, isotopy, optimizer, reidemeister
from ..geometry import PolygonalKnot
from ..thickness import AdmissibilityReport, ThicknessBreakdown


def _none_if_inf(x: float) -> Optional[float]:
    return None if x is None or math.isinf(x) else float(x)


class KnotModel(BaseModel):
    vertices: list[tuple[float, float, float]]

    def to_knot(self) -> PolygonalKnot:
        return PolygonalKnot(self.vertices)

    @classmethod
    def from_knot(cls, knot: PolygonalKnot) -> "KnotModel":
        return cls(vertices=[tuple(v) for v in knot.vertices])


class IsotopyModel(BaseModel):
    times: list[float]
    keyframes: list[KnotModel]

    def to_path(self) -> isotopy.IsotopyPath:
        return isotopy.IsotopyPath(
            [k.to_knot() for k in self.keyframes], np.asarray(self.times)
        )

    @classmethod
    def from_path(cls, path: isotopy.IsotopyPath) -> "IsotopyModel":
        return cls(
            times=[float(t) for t in path.times],
            keyframes=[KnotModel.from_knot(k) for k in path.keyframes],
        )


class OptimizeConfigModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    level_lambda: float = Field(alias="lambda")
    keyframe_count: int = 16
    time_samples: int = 33
    penalty_weight_initial: float = 100.0
    penalty_growth: float = 10.0
    max_outer_iters: int = 8
    max_inner_iters: int = 40
    step_tolerance: float = 1e-10
    objective_tolerance: float = 1e-11
    seed: int = 0

    def to_config(self) -> optimizer.OptimizeConfig:
        return optimizer.OptimizeConfig(
            lam=self.level_lambda,
            keyframe_count=self.keyframe_count,
            time_samples=self.time_samples,
            penalty_weight_initial=self.penalty_weight_initial,
            penalty_growth=self.penalty_growth,
            max_outer_iters=self.max_outer_iters,
            max_inner_iters=self.max_inner_iters,
            step_tolerance=self.step_tolerance,
            objective_tolerance=self.objective_tolerance,
            seed=self.seed,
        )


class ChordPointModel(BaseModel):
    kind: str
    index: int
    param: Optional[float] = None
    point: tuple[float, float, float]


class ThicknessResponse(BaseModel):
    min_rad: Optional[float]
    half_dcsd: Optional[float]
    thickness: Optional[float]
    argmin_vertex: Optional[int]
    argmin_pair: Optional[tuple[ChordPointModel, ChordPointModel]]

    @classmethod
    def from_breakdown(cls, b: ThicknessBreakdown) -> "ThicknessResponse":
        pair = None
        if b.argmin_pair is not None:
            pair = tuple(
                ChordPointModel(kind=p.kind, index=p.index, param=p.param, point=p.point)
                for p in b.argmin_pair
            )
        return cls(
            min_rad=_none_if_inf(b.min_rad),
            half_dcsd=_none_if_inf(b.half_dcsd),
            thickness=_none_if_inf(b.thickness),
            argmin_vertex=b.argmin_vertex,
            argmin_pair=pair,
        )


class RopelengthResponse(BaseModel):
    length: float
    thickness: float
    ropelength: float


class SweepRequest(BaseModel):
    isotopy: IsotopyModel


class SweepResponse(BaseModel):
    total: float
    per_interval: list[float]
    per_face_max: float


class KnotRequest(BaseModel):
    knot: KnotModel


class PairRequest(BaseModel):
    knot0: KnotModel
    knot1: KnotModel


class BoundModel(BaseModel):
    value: float
    kind: str
    witness: dict

    @classmethod
    def from_bound(cls, b: calibration.Bound) -> "BoundModel":
        return cls(value=b.value, kind=b.kind.value, witness=dict(b.witness))


class BoundRequest(PairRequest):
    plane: Optional[tuple[float, float, float]] = None


class BoundResponse(BaseModel):
    sup_plane: BoundModel
    projected: Optional[BoundModel] = None


class AdmissibleRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    isotopy: IsotopyModel
    level_lambda: float = Field(alias="lambda")
    time_samples: int = 64


class SliceCheckModel(BaseModel):
    time: float
    thickness: float
    length: float
    ok: bool


class AdmissibleResponse(BaseModel):
    level_lambda: float
    admissible: bool
    per_slice: list[SliceCheckModel]

    @classmethod
    def from_report(cls, r: AdmissibilityReport) -> "AdmissibleResponse":
        return cls(
            level_lambda=r.level_lambda,
            admissible=r.admissible,
            per_slice=[
                SliceCheckModel(
                    time=s.time, thickness=s.thickness, length=s.length, ok=s.ok
                )
                for s in r.per_slice
            ],
        )


class OptimizeRequest(PairRequest):
    config: OptimizeConfigModel


class LoopCostRequest(BaseModel):
    isotopy: IsotopyModel
    config: OptimizeConfigModel


class OptimizeResponse(BaseModel):
    path: IsotopyModel
    upper_bound: float
    admissible: bool
    constraint_violation_max: float
    iterations: int
    converged: bool

    @classmethod
    def from_result(cls, r: optimizer.OptimizeResult) -> "OptimizeResponse":
        return cls(
            path=IsotopyModel.from_path(r.path),
            upper_bound=r.upper_bound,
            admissible=r.admissible,
            constraint_violation_max=r.constraint_violation_max,
            iterations=r.iterations,
            converged=r.converged,
        )


class MergeScaleRequest(PairRequest):
    lambda_lo: float
    lambda_hi: float
    config: OptimizeConfigModel


class MergeScaleResponse(BaseModel):
    merge_scale_upper: float


class LambdaSweepRequest(PairRequest):
    levels: list[float]
    config: OptimizeConfigModel


class LambdaSweepEntry(BaseModel):
    level_lambda: float
    upper_bound: Optional[float]


class LambdaSweepResponse(BaseModel):
    results: list[LambdaSweepEntry]


class DiagramRequest(BaseModel):
    knot: KnotModel
    u: tuple[float, float, float]


class CrossingModel(BaseModel):
    over_edge: int
    under_edge: int
    sign: int
    position: tuple[float, float]


class DiagramResponse(BaseModel):
    crossings: list[CrossingModel]
    gauss_code: str

    @classmethod
    def from_diagram(cls, d: reidemeister.Diagram) -> "DiagramResponse":
        return cls(
            crossings=[
                CrossingModel(
                    over_edge=c.over_edge,
                    under_edge=c.under_edge,
                    sign=c.sign,
                    position=c.position,
                )
                for c in d.crossings
            ],
            gauss_code=d.gauss_code,
        )


class GraphRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    isotopies: list[IsotopyModel]
    u: tuple[float, float, float]
    level_lambda: Optional[float] = Field(default=None, alias="lambda")
    time_resolution: int = 256


class GraphEdgeModel(BaseModel):
    source: str
    target: str
    weight: float
    witness_interval: tuple[float, float]


class GraphModel(BaseModel):
    nodes: list[str]
    edges: list[GraphEdgeModel]
    level_lambda: Optional[float] = None

    def to_graph(self) -> reidemeister.DiagramGraph:
        return reidemeister.DiagramGraph(
            nodes=tuple(self.nodes),
            edges=tuple(
                reidemeister.GraphEdge(
                    e.source, e.target, e.weight, tuple(e.witness_interval)
                )
                for e in self.edges
            ),
            level_lambda=self.level_lambda,
        )

    @classmethod
    def from_graph(cls, g: reidemeister.DiagramGraph) -> "GraphModel":
        return cls(
            nodes=list(g.nodes),
            edges=[
                GraphEdgeModel(
                    source=e.source,
                    target=e.target,
                    weight=e.weight,
                    witness_interval=e.witness_interval,
                )
                for e in g.edges
            ],
            level_lambda=g.level_lambda,
        )


class DiagramDistanceRequest(BaseModel):
    graph: GraphModel
    code0: str
    code1: str


class DiagramDistanceResponse(BaseModel):
    distance: Optional[float]


class GenerateRequest(BaseModel):
    family: str
    parameters: dict[str, float] = {}
    seed: int = 0


class EventModel(BaseModel):
    time: float
    kind: str
    crossing_delta: int

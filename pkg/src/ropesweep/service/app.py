"""FastAPI service exposing the knot-geometry computations.

Domain validation failures map to HTTP 422 and numeric failures to HTTP
409, mirroring the CLI exit codes 2 and 3.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import calibration, corpus, geometry, isotopy, optimizer, reidemeister
from ..thickness import check_admissible, ropelength, thickness as thickness_of
from ..errors import NumericError, RopesweepError, ValidationError
from . import models


def create_app() -> FastAPI:
    app = FastAPI(
        title="ropesweep",
        description="Thickness, ropelength, swept-area costs and diagram graphs "
        "for polygonal knots.",
        version="0.1.0",
    )

    @app.exception_handler(RopesweepError)
    async def _domain_error(request: Request, exc: RopesweepError):
        status = 409 if isinstance(exc, NumericError) else 422
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/thickness", response_model=models.ThicknessResponse)
    def thickness_endpoint(req: models.KnotRequest):
        return models.ThicknessResponse.from_breakdown(thickness_of(req.knot.to_knot()))

    @app.post("/rop", response_model=models.RopelengthResponse)
    def rop_endpoint(req: models.KnotRequest):
        knot = req.knot.to_knot()
        breakdown = thickness_of(knot)
        return models.RopelengthResponse(
            length=geometry.length(knot),
            thickness=breakdown.thickness,
            ropelength=ropelength(knot),
        )

    @app.post("/sweep", response_model=models.SweepResponse)
    def sweep_endpoint(req: models.SweepRequest):
        result = isotopy.swept_area(req.isotopy.to_path())
        return models.SweepResponse(
            total=result.total,
            per_interval=list(result.per_interval),
            per_face_max=result.per_face_max,
        )

    @app.post("/bound", response_model=models.BoundResponse)
    def bound_endpoint(req: models.BoundRequest):
        k0 = req.knot0.to_knot()
        k1 = req.knot1.to_knot()
        sup = calibration.sup_plane_bound(k0, k1)
        projected = None
        if req.plane is not None:
            plane = geometry.OrientedPlane.from_vector(req.plane)
            projected = models.BoundModel.from_bound(
                calibration.projected_area_bound(k0, k1, plane)
            )
        return models.BoundResponse(
            sup_plane=models.BoundModel.from_bound(sup), projected=projected
        )

    @app.post("/admissible", response_model=models.AdmissibleResponse)
    def admissible_endpoint(req: models.AdmissibleRequest):
        report = check_admissible(
            req.isotopy.to_path(), req.level_lambda, req.time_samples
        )
        return models.AdmissibleResponse.from_report(report)

    @app.post("/optimize", response_model=models.OptimizeResponse)
    def optimize_endpoint(req: models.OptimizeRequest):
        result = optimizer.minimize_sweep(
            req.knot0.to_knot(), req.knot1.to_knot(), req.config.to_config()
        )
        return models.OptimizeResponse.from_result(result)

    @app.post("/loop-cost", response_model=models.OptimizeResponse)
    def loop_cost_endpoint(req: models.LoopCostRequest):
        path = req.isotopy.to_path()
        result = optimizer.loop_cost(path.keyframes[0], path, req.config.to_config())
        return models.OptimizeResponse.from_result(result)

    @app.post("/merge-scale", response_model=models.MergeScaleResponse)
    def merge_scale_endpoint(req: models.MergeScaleRequest):
        value = optimizer.merge_scale_upper(
            req.knot0.to_knot(),
            req.knot1.to_knot(),
            req.lambda_lo,
            req.lambda_hi,
            req.config.to_config(),
        )
        return models.MergeScaleResponse(merge_scale_upper=value)

    @app.post("/lambda-sweep", response_model=models.LambdaSweepResponse)
    def lambda_sweep_endpoint(req: models.LambdaSweepRequest):
        rows = optimizer.lambda_sweep(
            req.knot0.to_knot(), req.knot1.to_knot(), req.levels, req.config.to_config()
        )
        return models.LambdaSweepResponse(
            results=[
                models.LambdaSweepEntry(
                    level_lambda=level,
                    upper_bound=None if math.isinf(value) else value,
                )
                for level, value in rows
            ]
        )

    @app.post("/diagram", response_model=models.DiagramResponse)
    def diagram_endpoint(req: models.DiagramRequest):
        return models.DiagramResponse.from_diagram(
            reidemeister.project(req.knot.to_knot(), req.u)
        )

    @app.post("/events", response_model=list[models.EventModel])
    def events_endpoint(req: models.GraphRequest):
        out = []
        for iso in req.isotopies:
            for e in reidemeister.detect_events(iso.to_path(), req.u, req.time_resolution):
                out.append(
                    models.EventModel(time=e.time, kind=e.kind, crossing_delta=e.crossing_delta)
                )
        return out

    @app.post("/graph", response_model=models.GraphModel)
    def graph_endpoint(req: models.GraphRequest):
        graph = reidemeister.build_graph(
            [iso.to_path() for iso in req.isotopies],
            req.u,
            level_lambda=req.level_lambda,
            time_resolution=req.time_resolution,
        )
        return models.GraphModel.from_graph(graph)

    @app.post("/ddist", response_model=models.DiagramDistanceResponse)
    def ddist_endpoint(req: models.DiagramDistanceRequest):
        value = reidemeister.diagram_distance(req.graph.to_graph(), req.code0, req.code1)
        return models.DiagramDistanceResponse(
            distance=None if math.isinf(value) else value
        )

    @app.post("/generate", response_model=models.KnotModel)
    def generate_endpoint(req: models.GenerateRequest):
        try:
            family = corpus.CorpusFamily(req.family)
        except ValueError as exc:
            raise ValidationError(f"unknown corpus family {req.family!r}") from exc
        spec = corpus.CorpusSpec(family=family, parameters=req.parameters, seed=req.seed)
        return models.KnotModel.from_knot(corpus.generate(spec))

    return app


app = create_app()

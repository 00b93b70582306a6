"""HTTP generation API consumed by the studio UI and scripted clients.

All errors use the machine-readable envelope
`{"error": {"code": str, "message": str}}` with 400 for semantic problems
in graphs/layouts, 422 for request validation, and 500 otherwise.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

import guilget
from guilget.geometry import BBox
from guilget.graph import GuiAG, parse_ag
from guilget.metrics import PlacedLayout, alignment, ccs, cpi, gui_agc
from guilget.model.sampling import generate_layout
from guilget.model.stages import GuilgetModel
from guilget.tokens import SequenceTooLongError
from guilget.vocab import COMPONENT_CLASSES, PREDICATES


class ApiError(Exception):
    def __init__(self, code: str, message: str, status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status


class GenerateRequest(BaseModel):
    graph: dict
    samples: int = Field(default=1, ge=1, le=16)
    temperature: float = Field(default=0.5, ge=0.0)
    seed: Optional[int] = None


class MetricsRequest(BaseModel):
    graph: dict
    layout: dict


def _parse_graph(doc: dict) -> GuiAG:
    try:
        return parse_ag(doc)
    except (ValueError, KeyError, TypeError) as exc:
        raise ApiError("invalid_graph", str(exc), 400) from exc


def _parse_layout_boxes(doc: dict, graph: GuiAG) -> dict[int, BBox]:
    known = set(graph.component_ids())
    try:
        entries = doc["boxes"]
    except (KeyError, TypeError) as exc:
        raise ApiError("invalid_layout", "layout must contain a 'boxes' list", 400) from exc
    boxes: dict[int, BBox] = {}
    for entry in entries:
        try:
            instance = int(entry["id"])
            box = BBox(
                float(entry["x"]), float(entry["y"]), float(entry["w"]), float(entry["h"])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ApiError("invalid_layout", f"bad box entry: {exc}", 400) from exc
        if instance not in known:
            raise ApiError("invalid_layout", f"layout references unknown instance {instance}", 400)
        boxes[instance] = box
    return boxes


def _layout_metrics(graph: GuiAG, boxes: dict[int, BBox]) -> dict[str, float]:
    placed = PlacedLayout.from_generated(graph, boxes)
    return {
        "gui_agc": gui_agc([(graph, boxes)]),
        "cpi": cpi([placed]),
        "ccs": ccs([placed]),
        "alignment": alignment([placed]),
    }


def create_app(model: GuilgetModel, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="guilget", version=guilget.__version__)

    @app.exception_handler(ApiError)
    async def api_error_handler(_: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=422,
            content={"error": {"code": "validation_error", "message": str(exc.errors())}},
        )

    @app.exception_handler(Exception)
    async def fallback_handler(_: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(
            status_code=500,
            content={"error": {"code": "internal", "message": str(exc)}},
        )

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "version": guilget.__version__}

    @app.get("/api/vocab")
    def vocab() -> dict:
        return {
            "classes": [
                {"id": c.id, "name": c.name, "container": c.container}
                for c in COMPONENT_CLASSES
            ],
            "predicates": [p.value for p in PREDICATES],
        }

    @app.post("/api/generate")
    def generate(req: GenerateRequest) -> dict:
        graph = _parse_graph(req.graph)
        seed = req.seed
        if seed is None:
            seed = int(np.random.SeedSequence().generate_state(1)[0])
        classes = graph.classes_by_id()
        try:
            sampled = generate_layout(model, graph, req.samples, req.temperature, seed)
        except SequenceTooLongError as exc:
            raise ApiError("sequence_too_long", str(exc), 422) from exc
        layouts = []
        for boxes in sampled:
            layouts.append(
                {
                    "boxes": [
                        {
                            "id": instance,
                            "class": classes[instance],
                            "x": box.x,
                            "y": box.y,
                            "w": box.w,
                            "h": box.h,
                        }
                        for instance, box in sorted(boxes.items())
                    ],
                    "metrics": _layout_metrics(graph, boxes),
                }
            )
        return {"layouts": layouts}

    @app.post("/api/metrics")
    def metrics(req: MetricsRequest) -> dict:
        graph = _parse_graph(req.graph)
        boxes = _parse_layout_boxes(req.layout, graph)
        return _layout_metrics(graph, boxes)

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="studio")

    return app

"""HTTP surface for segmentation, detection, and feedback generation."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .config import AppConfig, load_config
from .corpus import LabelRegistry, Segment, default_registry, load_label_registry
from .detector.training import TrainedDetector, TrainingError, load_detector
from .feedback.evolve import run_evolution
from .feedback.templates import TemplateError, TemplateRegistry
from .gateway import GatewayError
from .pipeline import (
    Deadline,
    DeadlineExceeded,
    PipelineSettings,
    detect_segment,
    review_from_request,
    run_pipeline,
)
from .prompts import PromptSet


class SegmentBody(BaseModel):
    review_id: str = "adhoc"
    review_text: str | None = None
    sections: dict[str, str] | None = None


class DetectBody(BaseModel):
    detector_id: str
    segment_text: str | None = None
    segments: list[str] | None = None
    registry_version: str | None = None


class FeedbackBody(BaseModel):
    segment_text: str
    labels: list[str] = Field(min_length=1)
    context: dict[str, str] | None = None
    seed: int | None = None


class PipelineBody(BaseModel):
    detector_id: str
    review_id: str = "adhoc"
    review_text: str | None = None
    sections: dict[str, str] | None = None
    context: dict[str, str] | None = None


class _DetectorStore:
    """Loads detector files from a directory, cached on (path, mtime)."""

    def __init__(self, directory: str):
        self.directory = Path(directory)
        self._cache: dict[str, tuple[float, TrainedDetector]] = {}

    def get(self, detector_id: str) -> TrainedDetector:
        if "/" in detector_id or "\\" in detector_id or detector_id.startswith("."):
            raise FileNotFoundError(detector_id)
        path = self.directory / f"{detector_id}.json"
        mtime = path.stat().st_mtime  # FileNotFoundError -> 404 upstream
        hit = self._cache.get(detector_id)
        if hit is not None and hit[0] == mtime:
            return hit[1]
        detector = load_detector(path)
        self._cache[detector_id] = (mtime, detector)
        return detector


def _error(status: int, payload: Any) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": payload})


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or load_config()
    registry = (load_label_registry(config.registry_path)
                if config.registry_path else default_registry())
    templates = (TemplateRegistry.from_file(config.templates_path)
                 if config.templates_path else TemplateRegistry.default())
    prompts = (PromptSet.from_dir(config.prompts_dir)
               if config.prompts_dir else PromptSet.default())
    gateway = config.gateway.build()
    settings = PipelineSettings(
        registry=registry,
        templates=templates,
        prompts=prompts,
        gw_config=config.gateway,
        ga_config=config.ga,
        allow_generic_template=config.allow_generic_template,
    )
    store = _DetectorStore(config.detector_dir)

    app = FastAPI(title="lazylint", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.settings = settings
    app.state.gateway = gateway
    app.state.config = config

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        # contract says malformed input is a 400, not FastAPI's default 422
        return _error(400, {"error": "malformed request body", "errors": exc.errors()})

    @app.exception_handler(json.JSONDecodeError)
    async def bad_json(request: Request, exc: json.JSONDecodeError):
        return _error(400, {"error": "request body is not valid JSON"})

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__,
                "registry_version": registry.version}

    @app.get("/v1/labels")
    def labels() -> dict:
        return {
            "registry_version": registry.version,
            "labels": [
                {"key": lab.key, "kind": lab.kind.value, "display": lab.display,
                 "rationale": lab.rationale}
                for lab in registry
            ],
        }

    @app.post("/v1/segment")
    def segment(body: SegmentBody):
        try:
            review = review_from_request(body.review_id, body.review_text,
                                         body.sections, None)
        except ValueError as exc:
            return _error(400, str(exc))
        from .segmenter import segment_review
        try:
            tags, segments = segment_review(review, gateway, prompts, config.gateway)
        except GatewayError as exc:
            return _error(502, {"stage": "segment", "error": str(exc)})
        return {
            "review_id": review.id,
            "sentences": [
                {"index": s.index, "text": s.text, "section": s.section}
                for s in review.sentences
            ],
            "tags": [t.value for t in tags],
            "segments": [
                {"start": seg.start, "end": seg.end, "text": seg.text}
                for seg in segments
            ],
        }

    @app.post("/v1/detect")
    def detect(body: DetectBody):
        texts = list(body.segments or [])
        if body.segment_text is not None:
            texts.insert(0, body.segment_text)
        if not texts:
            return _error(400, "segment_text or segments is required")
        try:
            detector = store.get(body.detector_id)
        except FileNotFoundError:
            return _error(404, f"unknown detector {body.detector_id!r}")
        except TrainingError as exc:
            return _error(409, str(exc))
        wanted = body.registry_version
        if wanted is not None and wanted != detector.registry_version:
            return _error(409, {
                "error": "registry version mismatch",
                "requested": wanted,
                "detector": detector.registry_version,
            })
        if detector.registry_version != registry.version:
            return _error(409, {
                "error": "registry version mismatch",
                "service": registry.version,
                "detector": detector.registry_version,
            })
        results = []
        for i, text in enumerate(texts):
            seg = Segment(review_id="adhoc", start=i, end=i, text=text)
            try:
                result = detect_segment(seg, detector, settings, gateway)
            except GatewayError as exc:
                return _error(502, {"stage": "detect", "error": str(exc)})
            results.append({
                "text": text,
                "labels": sorted(result.labels),
                "scores": {k: result.scores[k] for k in sorted(result.scores)},
            })
        return {"detector_id": body.detector_id,
                "registry_version": detector.registry_version,
                "results": results}

    @app.post("/v1/feedback")
    def feedback(body: FeedbackBody):
        try:
            registry.validate_label_set(body.labels, where="labels")
        except Exception as exc:
            return _error(400, str(exc))
        review = review_from_request("adhoc", body.segment_text, None, body.context)
        ga_config = settings.ga_config
        if body.seed is not None:
            from dataclasses import replace
            ga_config = replace(ga_config, seed=body.seed)
        entries = []
        for key in body.labels:
            if key == registry.none_key:
                continue
            label = registry.get(key)
            try:
                template = templates.get(key, allow_generic=config.allow_generic_template)
            except TemplateError as exc:
                return _error(422, str(exc))
            try:
                evolution = run_evolution(body.segment_text, label, template,
                                          review.context, gateway, prompts,
                                          config.gateway, ga_config)
            except GatewayError as exc:
                return _error(502, {"stage": "feedback", "error": str(exc)})
            entries.append({
                "label": key,
                "text": evolution.best.text,
                "fitness": evolution.best.fitness.to_dict(),
                "generation": evolution.best.generation,
                "parent_ids": list(evolution.best.parent_ids),
                "tie_applied": evolution.tie_applied,
            })
        return {"feedback": entries}

    @app.post("/v1/pipeline")
    def pipeline(body: PipelineBody):
        try:
            detector = store.get(body.detector_id)
        except FileNotFoundError:
            return _error(404, f"unknown detector {body.detector_id!r}")
        except TrainingError as exc:
            return _error(409, str(exc))
        if detector.registry_version != registry.version:
            return _error(409, {
                "error": "registry version mismatch",
                "service": registry.version,
                "detector": detector.registry_version,
            })
        try:
            review = review_from_request(body.review_id, body.review_text,
                                         body.sections, body.context)
        except ValueError as exc:
            return _error(400, str(exc))
        deadline = Deadline(config.deadline_s)
        try:
            return run_pipeline(review, detector, settings, gateway, deadline)
        except DeadlineExceeded as exc:
            return _error(504, {"stage": exc.stage, "completed": exc.completed})
        except TemplateError as exc:
            return _error(422, str(exc))
        except GatewayError as exc:
            stage = ("segment" if "segment" not in deadline.completed
                     else "detect" if "detect" not in deadline.completed
                     else "feedback")
            return _error(502, {"stage": stage, "error": str(exc)})

    return app


def serve(config: AppConfig, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=config.port)

"""End-to-end review processing: segment, detect, generate feedback.

The service endpoints and the CLI both call into here, so their results are
the same JSON-ready structures.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .corpus import LabelRegistry, PlanContext, ReviewRecord, Segment
from .detector.features import featurize
from .detector.training import TrainedDetector, predict
from .feedback.evolve import GaConfig, run_evolution
from .feedback.templates import TemplateRegistry
from .gateway import GatewayConfig, LlmGateway
from .prompts import PromptSet
from .segmenter import segment_review, sentencize


class DeadlineExceeded(RuntimeError):
    def __init__(self, stage: str, completed: list[str]):
        super().__init__(f"deadline exceeded during stage {stage!r}")
        self.stage = stage
        self.completed = completed


class Deadline:
    """Wall-clock budget checked between pipeline stages."""

    def __init__(self, seconds: float | None):
        self.seconds = seconds
        self.started = time.monotonic()
        self.completed: list[str] = []

    def check(self, next_stage: str) -> None:
        if self.seconds is not None and time.monotonic() - self.started > self.seconds:
            raise DeadlineExceeded(next_stage, list(self.completed))

    def done(self, stage: str) -> None:
        self.completed.append(stage)


@dataclass(slots=True)
class PipelineSettings:
    registry: LabelRegistry
    templates: TemplateRegistry
    prompts: PromptSet
    gw_config: GatewayConfig
    ga_config: GaConfig = field(default_factory=GaConfig)
    allow_generic_template: bool = True


def review_from_request(review_id: str, review_text: str | None,
                        sections: dict[str, str] | None,
                        context: dict[str, str] | None) -> ReviewRecord:
    """Build a record from raw request fields; bare text becomes 'weaknesses'."""
    if sections is None:
        if review_text is None or not review_text.strip():
            raise ValueError("either review_text or sections is required")
        sections = {"weaknesses": review_text}
    ctx = context or {}
    record = ReviewRecord(
        id=review_id,
        sections=dict(sections),
        context=PlanContext(
            abstract=ctx.get("abstract", ""),
            reviewer_summary=ctx.get("summary", ""),
            reviewer_strengths=ctx.get("strengths", ""),
        ),
    )
    sentences = []
    for name in record.section_order():
        sentences.extend(sentencize(record.sections[name], section=name,
                                    start_index=len(sentences)))
    record.sentences = sentences
    return record


def detect_segment(segment: Segment, detector: TrainedDetector,
                   settings: PipelineSettings, gateway: LlmGateway):
    vector = featurize(segment, detector.question_banks, settings.registry,
                       gateway, settings.prompts, settings.gw_config)
    return predict(vector, detector, settings.registry)


def run_pipeline(review: ReviewRecord, detector: TrainedDetector,
                 settings: PipelineSettings, gateway: LlmGateway,
                 deadline: Deadline | None = None) -> dict:
    deadline = deadline or Deadline(None)

    deadline.check("segment")
    tags, segments = segment_review(review, gateway, settings.prompts,
                                    settings.gw_config)
    deadline.done("segment")

    none_key = settings.registry.none_key
    segment_views = []
    flagged: list[tuple[int, Segment, list[str]]] = []
    for i, seg in enumerate(segments):
        deadline.check("detect")
        result = detect_segment(seg, detector, settings, gateway)
        fired = sorted(result.labels - {none_key})
        segment_views.append({
            "start": seg.start,
            "end": seg.end,
            "text": seg.text,
            "labels": fired if fired else [none_key],
            "scores": {k: result.scores[k] for k in sorted(result.scores)},
        })
        if fired:
            flagged.append((i, seg, fired))
    deadline.done("detect")

    feedback_entries = []
    for seg_index, seg, fired in flagged:
        for key in fired:
            deadline.check("feedback")
            label = settings.registry.get(key)
            template = settings.templates.get(
                key, allow_generic=settings.allow_generic_template)
            evolution = run_evolution(seg.text, label, template, review.context,
                                      gateway, settings.prompts, settings.gw_config,
                                      settings.ga_config)
            feedback_entries.append({
                "segment": seg_index,
                "label": key,
                "text": evolution.best.text,
                "fitness": evolution.best.fitness.to_dict(),
                "generation": evolution.best.generation,
                "parent_ids": list(evolution.best.parent_ids),
                "tie_applied": evolution.tie_applied,
            })
    deadline.done("feedback")

    issue_counts: dict[str, int] = {}
    for view in segment_views:
        for key in view["labels"]:
            if key != none_key:
                issue_counts[key] = issue_counts.get(key, 0) + 1

    return {
        "review_id": review.id,
        "sentences": [
            {"index": s.index, "text": s.text, "section": s.section}
            for s in review.sentences
        ],
        "tags": [t.value for t in tags],
        "segments": segment_views,
        "feedback": feedback_entries,
        "issue_counts": dict(sorted(issue_counts.items())),
        "issue_total": sum(issue_counts.values()),
    }

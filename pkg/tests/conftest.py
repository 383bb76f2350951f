"""Shared test fixtures: registries, scripted gateways, corpus builders."""

from __future__ import annotations

import json
import re

import pytest

from lazylint.corpus import (
    IssueLabel,
    LabelKind,
    LabelRegistry,
    PlanContext,
    ReviewRecord,
    Segment,
    Sentence,
)
from lazylint.gateway import GatewayConfig, LlmGateway, RecordingBackend, ReplayBackend


def make_registry(n_issues: int = 4, version: str = "test-reg") -> LabelRegistry:
    """A registry with n_issues detectable labels plus the two reserved ones."""
    labels = [
        IssueLabel(key=f"lab-{i}", kind=LabelKind.LAZY, display=f"Issue {i}",
                   rationale=f"Pattern {i} is dismissive.")
        for i in range(n_issues)
    ]
    labels.append(IssueLabel(key="none", kind=LabelKind.NONE, display="No issue"))
    labels.append(IssueLabel(key="not-enough-info", kind=LabelKind.NOT_ENOUGH_INFO,
                             display="Not enough information"))
    return LabelRegistry(labels=tuple(labels), version=version)


def rule_gateway(respond) -> LlmGateway:
    return LlmGateway(RecordingBackend(respond))


def replay_gateway(responses: dict[str, str], fallback: str | None = None) -> LlmGateway:
    return LlmGateway(ReplayBackend(dict(responses), fallback=fallback))


@pytest.fixture
def gw_config() -> GatewayConfig:
    return GatewayConfig(backend="replay", model="default")


def make_review(rid: str, texts_tags_labels, section: str = "weaknesses") -> ReviewRecord:
    """Build a review from (sentence_text, tag, labels_for_segment_start) triples.

    Tags are 'B'/'I'/'O'; labels attach to the segment whose B row carries them.
    """
    from lazylint.corpus import BioTag

    sentences = [
        Sentence(index=i, text=t, section=section)
        for i, (t, _, _) in enumerate(texts_tags_labels)
    ]
    tags = [BioTag.parse(tag) for _, tag, _ in texts_tags_labels]
    segments = []
    start = None
    seg_labels: list[str] = []
    rows = list(texts_tags_labels) + [("", "O", None)]
    for i, (_, tag, labels) in enumerate(rows):
        if tag in ("B", "O") and start is not None:
            segments.append(Segment.from_sentences(rid, sentences, start, i - 1, seg_labels))
            start = None
        if tag == "B":
            start = i
            seg_labels = list(labels or [])
    body = " ".join(s.text for s in sentences)
    return ReviewRecord(
        id=rid,
        sections={section: body},
        sentences=sentences,
        tags=tags,
        segments=segments,
        context=PlanContext(),
    )


def plan_json() -> str:
    return json.dumps([{
        "plan": "Use the abstract to name the claimed contribution.",
        "explanation": "The abstract states the disputed delta.",
    }])


def ga_responder(candidate_texts: dict[int, str], crossover_text):
    """Responder covering plan, candidate, and crossover requests.

    candidate_texts maps the 1-based candidate index to its reply;
    crossover_text is a string or a callable of the request body.
    """
    def respond(request) -> str:
        body = request.messages[-1][1]
        if "planning agent" in body:
            return plan_json()
        m = re.search(r"This is candidate (\d+) of (\d+)", body)
        if m:
            return candidate_texts[int(m.group(1))]
        if "Parent Feedbacks:" in body:
            return crossover_text(body) if callable(crossover_text) else crossover_text
        raise AssertionError("unscripted request: " + body[:120])

    return respond

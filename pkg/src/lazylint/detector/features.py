"""Ternary feature vectors from question-bank QA over a segment.

Vector layout: one block per registry label, in registry order, each block
holding that label's bank answers in question order.  Labels without a bank
(none / not-enough-info, normally) contribute all-zero blocks, so the vector
length is always ``len(registry) * questions_per_label``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from ..corpus import LabelRegistry, Segment
from ..gateway import ChatRequest, GatewayConfig, LlmGateway
from ..prompts import PromptSet
from .questions import QuestionBank, parse_qa_answer

FORMAT_VERSION = "1"


class FeatureError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class FeatureVector:
    values: tuple[int, ...]
    registry_version: str
    questions_per_label: int

    def __post_init__(self) -> None:
        if any(v not in (-1, 0, 1) for v in self.values):
            raise FeatureError("feature values must be ternary (-1, 0, 1)")
        if self.questions_per_label < 1:
            raise FeatureError("questions_per_label must be >= 1")
        if len(self.values) % self.questions_per_label != 0:
            raise FeatureError(
                f"vector length {len(self.values)} not a multiple of "
                f"{self.questions_per_label}"
            )


def check_banks(banks: Mapping[str, QuestionBank], registry: LabelRegistry) -> int:
    """All detectable labels covered, no stray keys, one shared bank size."""
    detectable = {lab.key for lab in registry.detectable()}
    missing = sorted(detectable - set(banks))
    if missing:
        raise FeatureError(f"missing question banks for labels: {missing}")
    stray = sorted(k for k in banks if k not in registry)
    if stray:
        raise FeatureError(f"question banks for unknown labels: {stray}")
    sizes = {b.size for b in banks.values()}
    if len(sizes) != 1:
        raise FeatureError(f"question banks disagree on size: {sorted(sizes)}")
    return sizes.pop()


def qa_request(segment: Segment, question: str, prompts: PromptSet,
               config: GatewayConfig) -> ChatRequest:
    body = prompts.render("feature_qa", segment=segment.text, question=question)
    return config.request(body)


def featurize(segment: Segment, banks: Mapping[str, QuestionBank],
              registry: LabelRegistry, gateway: LlmGateway, prompts: PromptSet,
              config: GatewayConfig) -> FeatureVector:
    """One QA completion per (label, question); answers map to -1/0/1."""
    per_label = check_banks(banks, registry)
    requests: list[ChatRequest] = []
    slots: list[int] = []  # vector index for each request
    for block, label in enumerate(registry):
        bank = banks.get(label.key)
        if bank is None:
            continue
        for q_idx, question in enumerate(bank.questions):
            requests.append(qa_request(segment, question, prompts, config))
            slots.append(block * per_label + q_idx)
    values = [0] * (len(registry) * per_label)
    for slot, response in zip(slots, gateway.complete_many(requests)):
        values[slot] = parse_qa_answer(response.content)
    return FeatureVector(values=tuple(values), registry_version=registry.version,
                         questions_per_label=per_label)


@dataclass(slots=True)
class FeatureRecord:
    """A featurized segment plus its gold labels, as stored in features files."""

    review_id: str
    start: int
    end: int
    vector: FeatureVector
    labels: set[str] = field(default_factory=set)


def save_features(records: Sequence[FeatureRecord], path: str | Path) -> None:
    if not records:
        raise FeatureError("refusing to write an empty features file")
    versions = {r.vector.registry_version for r in records}
    sizes = {r.vector.questions_per_label for r in records}
    if len(versions) != 1 or len(sizes) != 1:
        raise FeatureError("feature records disagree on registry version or bank size")
    payload = {
        "format_version": FORMAT_VERSION,
        "registry_version": versions.pop(),
        "questions_per_label": sizes.pop(),
        "items": [
            {
                "review_id": r.review_id,
                "start": r.start,
                "end": r.end,
                "vector": list(r.vector.values),
                "labels": sorted(r.labels),
            }
            for r in records
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def load_features(path: str | Path) -> list[FeatureRecord]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FeatureError(f"features file {path} is not valid JSON: {exc}") from exc
    declared = data.get("format_version")
    if declared != FORMAT_VERSION:
        raise FeatureError(
            f"unsupported features format_version {declared!r} (expected {FORMAT_VERSION!r})")
    version = str(data["registry_version"])
    per_label = int(data["questions_per_label"])
    records = []
    for i, item in enumerate(data.get("items", [])):
        try:
            records.append(FeatureRecord(
                review_id=str(item["review_id"]),
                start=int(item["start"]),
                end=int(item["end"]),
                vector=FeatureVector(values=tuple(int(v) for v in item["vector"]),
                                     registry_version=version,
                                     questions_per_label=per_label),
                labels=set(item.get("labels", [])),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise FeatureError(f"features file {path}, item {i}: {exc}") from exc
    return records

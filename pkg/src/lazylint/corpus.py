"""Review corpus data model: records, sentences, segments, and the issue-label registry.

Corpus files are line-delimited JSON, one review per line, with an optional
leading header line ``{"format_version": "1"}``.  The label registry is a JSON
file holding either a bare array of label entries or an object
``{"format_version": "1", "version": ..., "labels": [...]}``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

FORMAT_VERSION = "1"

# Section iteration order: weaknesses and comments first, everything else after.
PRIMARY_SECTIONS = ("weaknesses", "comments")


class CorpusError(ValueError):
    """Raised when a corpus or registry file violates its contract."""


class BioTag(str, Enum):
    B = "B"
    I = "I"
    O = "O"

    @classmethod
    def parse(cls, value: str) -> "BioTag":
        try:
            return cls(value)
        except ValueError:
            raise CorpusError(f"invalid tag {value!r}: expected one of B, I, O") from None


class LabelKind(str, Enum):
    LAZY = "lazy"
    SPECIFICITY = "specificity"
    NONE = "none"
    NOT_ENOUGH_INFO = "not-enough-info"


@dataclass(frozen=True, slots=True)
class IssueLabel:
    key: str
    kind: LabelKind
    display: str
    rationale: str = ""


@dataclass(slots=True)
class LabelRegistry:
    """Ordered issue-label inventory; order fixes feature-block layout."""

    labels: tuple[IssueLabel, ...]
    version: str = "1"

    def __post_init__(self) -> None:
        keys = [lab.key for lab in self.labels]
        dupes = [k for k, c in Counter(keys).items() if c > 1]
        if dupes:
            raise CorpusError(f"duplicate label keys in registry: {dupes}")
        none_count = sum(1 for lab in self.labels if lab.kind is LabelKind.NONE)
        nei_count = sum(1 for lab in self.labels if lab.kind is LabelKind.NOT_ENOUGH_INFO)
        if none_count != 1 or nei_count != 1:
            raise CorpusError(
                "registry must contain exactly one 'none' and one 'not-enough-info' label "
                f"(got {none_count} and {nei_count})"
            )

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, key: str) -> bool:
        return any(lab.key == key for lab in self.labels)

    def get(self, key: str) -> IssueLabel:
        for lab in self.labels:
            if lab.key == key:
                return lab
        raise KeyError(key)

    def index_of(self, key: str) -> int:
        for i, lab in enumerate(self.labels):
            if lab.key == key:
                return i
        raise KeyError(key)

    @property
    def none_key(self) -> str:
        return next(lab.key for lab in self.labels if lab.kind is LabelKind.NONE)

    @property
    def not_enough_info_key(self) -> str:
        return next(lab.key for lab in self.labels if lab.kind is LabelKind.NOT_ENOUGH_INFO)

    def detectable(self) -> tuple[IssueLabel, ...]:
        """Labels a detector is trained for: everything except none / not-enough-info."""
        return tuple(
            lab
            for lab in self.labels
            if lab.kind not in (LabelKind.NONE, LabelKind.NOT_ENOUGH_INFO)
        )

    def validate_label_set(self, keys: Iterable[str], where: str = "segment") -> set[str]:
        """Check keys exist and that none / not-enough-info are not mixed with others."""
        keyset = set(keys)
        unknown = sorted(k for k in keyset if k not in self)
        if unknown:
            raise CorpusError(f"{where}: unknown label keys {unknown}")
        sentinel = {self.none_key, self.not_enough_info_key}
        mixed = keyset & sentinel
        if mixed and keyset - sentinel:
            raise CorpusError(
                f"{where}: {sorted(mixed)} cannot be combined with other labels"
            )
        return keyset


@dataclass(frozen=True, slots=True)
class Sentence:
    index: int
    text: str
    section: str = ""


@dataclass(slots=True)
class Segment:
    """Maximal argumentative unit: a contiguous sentence range within one review."""

    review_id: str
    start: int
    end: int  # inclusive
    text: str
    labels: set[str] = field(default_factory=set)

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise CorpusError(
                f"segment range [{self.start}, {self.end}] invalid for review {self.review_id!r}"
            )

    @classmethod
    def from_sentences(
        cls,
        review_id: str,
        sentences: Sequence[Sentence],
        start: int,
        end: int,
        labels: Iterable[str] = (),
    ) -> "Segment":
        if end >= len(sentences):
            raise CorpusError(
                f"segment [{start}, {end}] out of range for review {review_id!r} "
                f"({len(sentences)} sentences)"
            )
        text = " ".join(sentences[i].text for i in range(start, end + 1))
        return cls(review_id=review_id, start=start, end=end, text=text, labels=set(labels))


@dataclass(frozen=True, slots=True)
class PlanContext:
    """Paper-side context handed to the feedback planner."""

    abstract: str = ""
    reviewer_summary: str = ""
    reviewer_strengths: str = ""


@dataclass(slots=True)
class ReviewRecord:
    id: str
    sections: dict[str, str]
    context: PlanContext = field(default_factory=PlanContext)
    sentences: list[Sentence] = field(default_factory=list)
    tags: list[BioTag] | None = None
    segments: list[Segment] | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("review id must be non-empty")
        for i, sent in enumerate(self.sentences):
            if sent.index != i:
                raise CorpusError(
                    f"review {self.id!r}: sentence indices must be contiguous from 0 "
                    f"(index {sent.index} at position {i})"
                )
        if self.tags is not None and len(self.tags) != len(self.sentences):
            raise CorpusError(
                f"review {self.id!r}: {len(self.tags)} tags for {len(self.sentences)} sentences"
            )
        if self.segments is not None:
            for seg in self.segments:
                if seg.end >= len(self.sentences):
                    raise CorpusError(
                        f"review {self.id!r}: segment [{seg.start}, {seg.end}] out of range"
                    )

    def section_order(self) -> list[str]:
        rest = sorted(k for k in self.sections if k not in PRIMARY_SECTIONS)
        return [k for k in PRIMARY_SECTIONS if k in self.sections] + rest

    def full_text(self) -> str:
        """Review body used as LLM context: sections joined with headers."""
        parts = []
        for name in self.section_order():
            body = self.sections[name].strip()
            if body:
                parts.append(f"{name.capitalize()}:\n{body}")
        return "\n\n".join(parts)


@dataclass(slots=True)
class StatsReport:
    total_reviews: int
    total_sentences: int
    total_segments: int
    segment_length_hist: dict[int, int]
    labels_per_segment_hist: dict[int, int]
    label_freq: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "total_reviews": self.total_reviews,
            "total_sentences": self.total_sentences,
            "total_segments": self.total_segments,
            "segment_length_hist": {str(k): v for k, v in sorted(self.segment_length_hist.items())},
            "labels_per_segment_hist": {
                str(k): v for k, v in sorted(self.labels_per_segment_hist.items())
            },
            "label_freq": dict(sorted(self.label_freq.items())),
        }


def _parse_record(obj: Mapping, line_no: int, registry: LabelRegistry | None) -> ReviewRecord:
    where = f"line {line_no}"
    if not isinstance(obj, Mapping):
        raise CorpusError(f"{where}: record must be a JSON object")
    try:
        rid = obj["id"]
        sections = obj["sections"]
    except KeyError as exc:
        raise CorpusError(f"{where}: missing required field {exc.args[0]!r}") from None
    if not isinstance(rid, str) or not rid:
        raise CorpusError(f"{where}: id must be a non-empty string")
    if not isinstance(sections, Mapping) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in sections.items()
    ):
        raise CorpusError(f"{where}: sections must map section names to text")

    ctx_obj = obj.get("context", {}) or {}
    context = PlanContext(
        abstract=ctx_obj.get("abstract", ""),
        reviewer_summary=ctx_obj.get("summary", ctx_obj.get("reviewer_summary", "")),
        reviewer_strengths=ctx_obj.get("strengths", ctx_obj.get("reviewer_strengths", "")),
    )

    sentences = [
        Sentence(index=s["index"], text=s["text"], section=s.get("section", ""))
        for s in obj.get("sentences", [])
    ]

    tags = None
    if obj.get("tags") is not None:
        tags = [BioTag.parse(t) for t in obj["tags"]]

    segments = None
    if obj.get("segments") is not None:
        segments = []
        for seg in obj["segments"]:
            labels = seg.get("labels", [])
            if registry is not None:
                registry.validate_label_set(labels, where=f"{where}, review {rid!r}")
            segments.append(
                Segment.from_sentences(
                    rid, sentences, int(seg["start"]), int(seg["end"]), labels
                )
            )

    try:
        return ReviewRecord(
            id=rid,
            sections=dict(sections),
            context=context,
            sentences=sentences,
            tags=tags,
            segments=segments,
        )
    except CorpusError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"{where}: malformed record: {exc}") from exc


def load_corpus(path: str | Path, registry: LabelRegistry | None = None) -> list[ReviewRecord]:
    """Load a line-delimited corpus file.  An empty file is an empty corpus."""
    path = Path(path)
    records: list[ReviewRecord] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: invalid JSON: {exc}") from exc
            if line_no == 1 and isinstance(obj, Mapping) and "id" not in obj:
                version = obj.get("format_version")
                if version != FORMAT_VERSION:
                    raise CorpusError(
                        f"unsupported corpus format_version {version!r} (expected {FORMAT_VERSION!r})"
                    )
                continue
            rec = _parse_record(obj, line_no, registry)
            if rec.id in seen:
                raise CorpusError(f"line {line_no}: duplicate review id {rec.id!r}")
            seen.add(rec.id)
            records.append(rec)
    return records


def dump_corpus(records: Iterable[ReviewRecord], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"format_version": FORMAT_VERSION}) + "\n")
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec), ensure_ascii=False) + "\n")


def record_to_dict(rec: ReviewRecord) -> dict:
    out: dict = {
        "id": rec.id,
        "sections": rec.sections,
        "context": {
            "abstract": rec.context.abstract,
            "summary": rec.context.reviewer_summary,
            "strengths": rec.context.reviewer_strengths,
        },
        "sentences": [
            {"index": s.index, "text": s.text, "section": s.section} for s in rec.sentences
        ],
    }
    if rec.tags is not None:
        out["tags"] = [t.value for t in rec.tags]
    if rec.segments is not None:
        out["segments"] = [
            {"start": seg.start, "end": seg.end, "labels": sorted(seg.labels)}
            for seg in rec.segments
        ]
    return out


def load_label_registry(path: str | Path) -> LabelRegistry:
    """Load a registry file (bare array, or object with format_version and labels)."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        data = json.load(fh)
    version = "1"
    if isinstance(data, Mapping):
        declared = data.get("format_version")
        if declared != FORMAT_VERSION:
            raise CorpusError(
                f"unsupported registry format_version {declared!r} (expected {FORMAT_VERSION!r})"
            )
        version = str(data.get("version", "1"))
        entries = data.get("labels")
        if not isinstance(entries, list):
            raise CorpusError("registry object must carry a 'labels' array")
    elif isinstance(data, list):
        entries = data
    else:
        raise CorpusError("registry file must be a JSON array or object")

    labels = []
    for i, entry in enumerate(entries):
        try:
            labels.append(
                IssueLabel(
                    key=entry["key"],
                    kind=LabelKind(entry["kind"]),
                    display=entry["display"],
                    rationale=entry.get("rationale", ""),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"registry entry {i}: {exc}") from exc
    return LabelRegistry(labels=tuple(labels), version=version)


def default_registry() -> LabelRegistry:
    """The registry shipped with the package."""
    ref = resources.files("lazylint.assets").joinpath("labels.json")
    with resources.as_file(ref) as path:
        return load_label_registry(path)


def corpus_stats(records: Sequence[ReviewRecord]) -> StatsReport:
    if not records:
        raise CorpusError("corpus_stats requires a non-empty corpus")
    seg_len: Counter[int] = Counter()
    labels_per: Counter[int] = Counter()
    label_freq: Counter[str] = Counter()
    total_segments = 0
    for rec in records:
        for seg in rec.segments or []:
            total_segments += 1
            seg_len[seg.end - seg.start + 1] += 1
            labels_per[len(seg.labels)] += 1
            label_freq.update(seg.labels)
    return StatsReport(
        total_reviews=len(records),
        total_sentences=sum(len(r.sentences) for r in records),
        total_segments=total_segments,
        segment_length_hist=dict(seg_len),
        labels_per_segment_hist=dict(labels_per),
        label_freq=dict(label_freq),
    )

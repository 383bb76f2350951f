"""Sentence splitting and B/I/O segment identification for review text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import BioTag, ReviewRecord, Segment, Sentence
from .gateway import ChatRequest, GatewayConfig, LlmGateway
from .prompts import PromptSet

# Trailing strings that suppress a sentence boundary at a period.
ABBREVIATIONS = (
    "e.g.", "i.e.", "et al.", "etc.", "cf.", "vs.", "viz.", "resp.", "ca.", "approx.",
    "fig.", "figs.", "eq.", "eqs.", "sec.", "secs.", "tab.", "no.", "nos.", "p.", "pp.",
    "dr.", "mr.", "ms.", "mrs.", "prof.",
)

_TERMINALS = ".!?"
_CLOSERS = "\"')]}’”"
_LIST_MARKER = re.compile(r"(\d{1,3}[.)]|[-*•])(\s|$)")
_ENUMERATOR = re.compile(r"(\d{1,3}|[a-zA-Z])[.)]?$")
_INLINE_ENUM = re.compile(r"\d{1,3}[.)]\s")


def _is_abbreviation(prefix: str) -> bool:
    low = prefix.lower()
    for abbr in ABBREVIATIONS:
        if low.endswith(abbr):
            head = low[: -len(abbr)]
            # word boundary: "see p." is an abbreviation, "stop." is not
            if not head or not head[-1].isalpha():
                return True
    return False


def split_sentences(text: str) -> list[str]:
    """Rule-based splitter.

    A boundary sits after a terminal (. ! ?) followed by whitespace and an
    uppercase letter, or at end of text.  Known abbreviations and bare list
    enumerators ("1.") never end a sentence; a newline followed by a list
    marker ("-", "*", "1.") always starts one.  Output keeps every
    non-whitespace character of the input.
    """
    n = len(text)
    bounds: list[int] = []  # exclusive end index of each sentence
    start = 0
    i = 0
    while i < n:
        ch = text[i]
        if ch == "\n":
            rest = text[i + 1:].lstrip(" \t")
            if _LIST_MARKER.match(rest) and text[start:i].strip():
                bounds.append(i)
                start = i + 1
            i += 1
            continue
        if ch not in _TERMINALS:
            i += 1
            continue
        # swallow runs like "?!" or "..." and closing quotes/brackets
        j = i + 1
        while j < n and text[j] in _TERMINALS:
            j += 1
        k = j
        while k < n and text[k] in _CLOSERS:
            k += 1
        if k >= n:
            bounds.append(n)
            start = n
            break
        if not text[k].isspace():
            i = j
            continue
        m = k
        while m < n and text[m].isspace():
            m += 1
        if m >= n:
            bounds.append(n)
            start = n
            break
        if ch == ".":
            if _is_abbreviation(text[start:j]):
                i = j
                continue
            head = text[start:j].strip()
            if _ENUMERATOR.fullmatch(head):
                # "1." at the start of a sentence is an enumerator, not an end
                i = j
                continue
        # a new sentence opens with an uppercase letter or an inline "1." item
        if text[m].isupper() or _INLINE_ENUM.match(text[m:]):
            bounds.append(k)
            start = m
        i = j if j > i else i + 1
    if start < n and text[start:].strip():
        bounds.append(n)

    sentences = []
    prev = 0
    for b in bounds:
        piece = text[prev:b].strip()
        if piece:
            sentences.append(piece)
        prev = b
    return sentences


def sentencize(section_text: str, section: str = "", start_index: int = 0) -> list[Sentence]:
    return [
        Sentence(index=start_index + i, text=t, section=section)
        for i, t in enumerate(split_sentences(section_text))
    ]


def sentencize_review(review_id: str, sections: dict[str, str]) -> list[Sentence]:
    """Split all sections, indices contiguous across the review."""
    rec = ReviewRecord(id=review_id, sections=dict(sections))
    sentences: list[Sentence] = []
    for name in rec.section_order():
        sentences.extend(sentencize(rec.sections[name], section=name,
                                    start_index=len(sentences)))
    return sentences


_TAG_TOKEN = re.compile(r"(?<![A-Za-z0-9])([BIO])(?![A-Za-z0-9])")


def parse_tag(response: str) -> BioTag:
    """Last standalone uppercase B/I/O token wins; anything else is O."""
    matches = _TAG_TOKEN.findall(response)
    if not matches:
        return BioTag.O
    return BioTag(matches[-1])


def repair_tags(tags: list[BioTag]) -> list[BioTag]:
    """An I with no live segment to continue becomes a B."""
    fixed: list[BioTag] = []
    for i, tag in enumerate(tags):
        if tag is BioTag.I and (i == 0 or fixed[i - 1] is BioTag.O):
            fixed.append(BioTag.B)
        else:
            fixed.append(tag)
    return fixed


def assemble_segments(tags: list[BioTag]) -> list[tuple[int, int]]:
    """Maximal B I* runs as inclusive (start, end) sentence ranges."""
    repaired = repair_tags(tags)
    ranges: list[tuple[int, int]] = []
    start: int | None = None
    for i, tag in enumerate(repaired):
        if tag is BioTag.B:
            if start is not None:
                ranges.append((start, i - 1))
            start = i
        elif tag is BioTag.O:
            if start is not None:
                ranges.append((start, i - 1))
                start = None
    if start is not None:
        ranges.append((start, len(repaired) - 1))
    return ranges


def tag_request(sentence: Sentence, review_text: str, prompts: PromptSet,
                config: GatewayConfig) -> ChatRequest:
    body = prompts.render("bio_tag", review=review_text, sentence=sentence.text)
    return config.request(body)


def tag_bio(review: ReviewRecord, gateway: LlmGateway, prompts: PromptSet,
            config: GatewayConfig) -> list[BioTag]:
    """One standalone completion per sentence, full review as context."""
    review_text = review.full_text()
    requests = [tag_request(s, review_text, prompts, config) for s in review.sentences]
    responses = gateway.complete_many(requests)
    return [parse_tag(r.content) for r in responses]


def segment_review(review: ReviewRecord, gateway: LlmGateway, prompts: PromptSet,
                   config: GatewayConfig) -> tuple[list[BioTag], list[Segment]]:
    tags = tag_bio(review, gateway, prompts, config)
    segments = [
        Segment.from_sentences(review.id, review.sentences, start, end)
        for start, end in assemble_segments(tags)
    ]
    return tags, segments


@dataclass(slots=True)
class TagReport:
    per_class: dict[str, dict[str, float]]  # tag -> {precision, recall, f1}
    micro: dict[str, float]

    def to_dict(self) -> dict:
        return {"per_class": self.per_class, "micro": self.micro}


def evaluate_tags(predicted: list[BioTag], gold: list[BioTag]) -> TagReport:
    if len(predicted) != len(gold):
        raise ValueError(f"length mismatch: {len(predicted)} predicted vs {len(gold)} gold")
    per_class: dict[str, dict[str, float]] = {}
    total_correct = sum(1 for p, g in zip(predicted, gold) if p == g)
    for tag in (BioTag.B, BioTag.I, BioTag.O):
        tp = sum(1 for p, g in zip(predicted, gold) if p == tag and g == tag)
        fp = sum(1 for p, g in zip(predicted, gold) if p == tag and g != tag)
        fn = sum(1 for p, g in zip(predicted, gold) if p != tag and g == tag)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        per_class[tag.value] = {"precision": prec, "recall": rec, "f1": f1}
    micro_val = total_correct / len(gold) if gold else 0.0
    # single-label tagging: micro precision == recall == f1 == accuracy
    micro = {"precision": micro_val, "recall": micro_val, "f1": micro_val}
    return TagReport(per_class=per_class, micro=micro)

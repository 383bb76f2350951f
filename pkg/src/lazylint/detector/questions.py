"""Per-label question banks: LLM-generated Yes/No probes for each issue label."""

from __future__ import annotations

import ast
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from ..corpus import IssueLabel, Segment
from ..gateway import ChatRequest, GatewayConfig, LlmGateway
from ..prompts import PromptSet

log = logging.getLogger(__name__)

DEFAULT_QUESTIONS_PER_LABEL = 10
MAX_RETRIES = 2

GENERIC_QUESTION = "Does the segment exhibit {display}?"


class BankGenerationError(RuntimeError):
    def __init__(self, label_key: str, reason: str):
        super().__init__(f"question bank generation failed for {label_key!r}: {reason}")
        self.label_key = label_key


@dataclass(frozen=True, slots=True)
class QuestionBank:
    label_key: str
    questions: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.questions:
            raise ValueError(f"question bank for {self.label_key!r} is empty")
        if any(not q or not q.strip() for q in self.questions):
            raise ValueError(f"question bank for {self.label_key!r} holds blank questions")

    @property
    def size(self) -> int:
        return len(self.questions)


def parse_question_list(response: str) -> list[str] | None:
    """Extract the first bracketed list of strings; None when unparseable."""
    start = response.find("[")
    if start == -1:
        return None
    depth = 0
    end = -1
    in_string: str | None = None
    escaped = False
    for i in range(start, len(response)):
        ch = response[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == in_string:
                in_string = None
            continue
        if ch in "\"'":
            in_string = ch
        elif ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                end = i
                break
    if end == -1:
        return None
    snippet = response[start:end + 1]
    for parser in (json.loads, ast.literal_eval):
        try:
            value = parser(snippet)
        except (ValueError, SyntaxError):
            continue
        if isinstance(value, list) and value and all(
            isinstance(item, str) and item.strip() for item in value
        ):
            return [item.strip() for item in value]
    return None


def bank_request(label: IssueLabel, exemplars: list[Segment], n: int,
                 prompts: PromptSet, config: GatewayConfig, attempt: int = 0) -> ChatRequest:
    segments_block = "\n".join(f"- {seg.text}" for seg in exemplars)
    body = prompts.render(
        "feature_extraction",
        issue=label.display,
        problem=label.rationale or label.display,
        segments=segments_block,
        n=str(n),
    )
    if attempt > 0:
        # distinct fingerprint per retry, and a genuine corrective nudge
        body += (f"\n\nRetry {attempt}: your previous output was not a valid list of "
                 f"exactly {n} strings. Return only the list.")
    return config.request(body)


def generate_question_bank(label: IssueLabel, exemplars: list[Segment],
                           gateway: LlmGateway, prompts: PromptSet,
                           config: GatewayConfig,
                           n: int = DEFAULT_QUESTIONS_PER_LABEL) -> QuestionBank:
    """Ask for exactly n questions; retry on bad output, then truncate or pad."""
    if n < 1:
        raise ValueError("question count must be >= 1")
    if not exemplars:
        raise BankGenerationError(label.key, "no exemplar segments")
    parsed: list[str] | None = None
    for attempt in range(MAX_RETRIES + 1):
        response = gateway.complete(bank_request(label, exemplars, n, prompts, config, attempt))
        parsed = parse_question_list(response.content)
        if parsed is not None and len(parsed) == n:
            return QuestionBank(label_key=label.key, questions=tuple(parsed))
    if parsed is None:
        raise BankGenerationError(label.key, f"unparseable output after {MAX_RETRIES} retries")
    if len(parsed) > n:
        log.warning("bank for %s returned %d questions, truncating to %d",
                    label.key, len(parsed), n)
        parsed = parsed[:n]
    else:
        log.warning("bank for %s returned %d questions, padding to %d",
                    label.key, len(parsed), n)
        filler = GENERIC_QUESTION.format(display=label.display)
        parsed = parsed + [filler] * (n - len(parsed))
    return QuestionBank(label_key=label.key, questions=tuple(parsed))


def generic_bank(label: IssueLabel, n: int = DEFAULT_QUESTIONS_PER_LABEL) -> QuestionBank:
    """Fallback bank for labels with no exemplars anywhere in the corpus."""
    return QuestionBank(label_key=label.key,
                        questions=tuple([GENERIC_QUESTION.format(display=label.display)] * n))


BANKS_FORMAT_VERSION = "1"


def save_banks(banks: dict[str, QuestionBank], registry_version: str,
               path: str | Path) -> None:
    if not banks:
        raise ValueError("refusing to write an empty banks file")
    sizes = {bank.size for bank in banks.values()}
    if len(sizes) != 1:
        raise ValueError("question banks disagree on size")
    payload = {
        "format_version": BANKS_FORMAT_VERSION,
        "registry_version": registry_version,
        "questions_per_label": sizes.pop(),
        "banks": {key: list(bank.questions) for key, bank in sorted(banks.items())},
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def load_banks(path: str | Path) -> tuple[dict[str, QuestionBank], str]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    declared = data.get("format_version")
    if declared != BANKS_FORMAT_VERSION:
        raise ValueError(
            f"unsupported banks format_version {declared!r} "
            f"(expected {BANKS_FORMAT_VERSION!r})")
    banks = {
        key: QuestionBank(label_key=key, questions=tuple(str(q) for q in questions))
        for key, questions in data["banks"].items()
    }
    per_label = int(data["questions_per_label"])
    if any(bank.size != per_label for bank in banks.values()):
        raise ValueError("banks file sizes disagree with questions_per_label")
    return banks, str(data["registry_version"])


_MARKERS = ("[[Yes]]", "[[No]]", "[[Other]]")
_MARKER_VALUES = {"[[Yes]]": 1, "[[No]]": -1, "[[Other]]": 0}
_MARKER_RE = re.compile("|".join(re.escape(m) for m in _MARKERS))


def parse_qa_answer(response: str) -> int:
    """[[Yes]] -> 1, [[No]] -> -1, [[Other]] -> 0; anything else -> 0.

    "Anything else" includes responses holding zero markers or more than one
    marker occurrence in total.
    """
    found = _MARKER_RE.findall(response)
    if len(found) != 1:
        return 0
    return _MARKER_VALUES[found[0]]

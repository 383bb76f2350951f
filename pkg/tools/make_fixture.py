"""Rebuild the shipped replay fixtures.

Runs the full pipeline once against a deterministic rule-based responder,
records every completion by request fingerprint, and freezes:

  - fixtures/replay.json          scripted responses for the demo review
  - fixtures/review.jsonl         the demo review corpus
  - fixtures/detector.json        a small trained detector (2 questions/label)
  - fixtures/golden_pipeline.json the expected `pipeline` output, byte for byte

Run from the repository root:  python3 tools/make_fixture.py
"""

from __future__ import annotations

import hashlib
import json
import re
import sys
from pathlib import Path

from lazylint.cli import main as cli_main
from lazylint.config import load_config
from lazylint.corpus import (
    PlanContext,
    ReviewRecord,
    Segment,
    default_registry,
    dump_corpus,
)
from lazylint.detector.features import featurize
from lazylint.detector.questions import QuestionBank
from lazylint.detector.training import save_detector, train_detector
from lazylint.gateway import LlmGateway, RecordingBackend
from lazylint.pipeline import PipelineSettings, run_pipeline
from lazylint.prompts import PromptSet
from lazylint.feedback.templates import TemplateRegistry

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "lazylint" / "assets" / "fixtures"

QUESTIONS_PER_LABEL = 2

# the review the golden output is built from
REVIEW_ID = "rev-001"
SECTIONS = {
    "weaknesses": ("The idea is not novel. Prior work already covers this "
                   "representation. I enjoyed the background section."),
    "strengths": "The writing is clear.",
    "summary": "The paper studies automatic quality control for peer reviews.",
}
CONTEXT = {
    "abstract": "We present a framework for flagging shallow reviewing patterns.",
    "summary": "The paper proposes automated review feedback.",
    "strengths": "Clear writing.",
}

# sentence -> scripted tag; [0,1] becomes the flagged segment, [2,2] stays clean
TAGS = {
    "The idea is not novel.": "B",
    "Prior work already covers this representation.": "I",
    "I enjoyed the background section.": "B",
    "The writing is clear.": "O",
    "The paper studies automatic quality control for peer reviews.": "O",
}

PHRASES = [
    "name the prior work you have in mind",
    "cite the specific published method",
    "quote the overlapping claim",
    "state which contribution is already covered",
    "compare the proposed approach with that baseline",
    "explain what the earlier paper already solves",
    "point to the section that repeats known results",
    "list the works that anticipate this idea",
]


def build_banks(registry) -> dict[str, QuestionBank]:
    return {
        lab.key: QuestionBank(
            label_key=lab.key,
            questions=tuple(
                f"Q{j}: does the segment show the pattern {lab.key}?"
                for j in range(QUESTIONS_PER_LABEL)
            ),
        )
        for lab in registry.detectable()
    }


def answer_question(segment_text: str, question: str) -> str:
    text = segment_text.lower()
    if "h3-not-novel" in question and "not novel" in text:
        return "[[Yes]]"
    if "s5-missing-baselines" in question and "missing" in text and "baseline" in text:
        return "[[Yes]]"
    return "[[No]]"


def respond(request) -> str:
    body = request.messages[-1][1]
    if "Answer with the single letter B, I, or O." in body:
        sentence = body.split("Target sentence:\n", 1)[1].split("\n\nAnswer", 1)[0].strip()
        return TAGS[sentence]
    if "Respond strictly with either:" in body:
        segment = re.search(r"Review Segment: (.*)", body).group(1)
        question = re.search(r"Question: (.*)", body).group(1)
        return answer_question(segment, question)
    if "planning agent" in body:
        return json.dumps([{
            "plan": "Use the abstract to name the claimed contribution and ask "
                    "which prior work covers it.",
            "explanation": "The abstract states the delta the reviewer disputes.",
        }])
    m = re.search(r"This is candidate (\d+) of (\d+)", body)
    if m:
        i = int(m.group(1))
        picked = [PHRASES[(i + j) % len(PHRASES)] for j in range(1 + i % 3)]
        return "To make this point verifiable, " + ", then ".join(picked) + "."
    if "Parent Feedbacks:" in body:
        h = int(hashlib.sha256(body.encode("utf-8")).hexdigest(), 16)
        picked = [PHRASES[(h + j) % len(PHRASES)] for j in range(2)]
        return ("Combining both drafts: " + " and ".join(picked)
                + " so the authors can respond concretely.")
    raise SystemExit("unscripted request:\n" + body[:200])


def build_detector(registry, prompts, gw_config, banks):
    """Train a small decision-tree detector on synthetic scripted segments."""
    def seg(i: int, text: str) -> Segment:
        return Segment(review_id=f"train-{i}", start=0, end=0, text=text)

    data = [
        (seg(0, "The core idea is not novel in this area."), {"h3-not-novel"}),
        (seg(1, "This contribution is not novel relative to earlier systems."), {"h3-not-novel"}),
        (seg(2, "The evaluation is missing baseline systems."), {"s5-missing-baselines"}),
        (seg(3, "Key baseline comparisons are missing from Table 2."), {"s5-missing-baselines"}),
        (seg(4, "The experiments are thorough and convincing."), {"none"}),
        (seg(5, "The paper is well organized."), {"none"}),
        (seg(6, "The framing is not novel."), {"h3-not-novel"}),
        (seg(7, "A missing baseline makes the claims hard to judge."), {"s5-missing-baselines"}),
    ]
    gateway = LlmGateway(RecordingBackend(respond))  # recording discarded
    examples = [
        (featurize(s, banks, registry, gateway, prompts, gw_config), labels)
        for s, labels in data
    ]
    return train_detector(examples[:6], examples[6:], registry, banks,
                          families=("decision-tree",), beta=0.5, seed=0)


def main() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    config = load_config()
    registry = default_registry()
    prompts = PromptSet.default()
    templates = TemplateRegistry.default()
    banks = build_banks(registry)

    detector = build_detector(registry, prompts, config.gateway, banks)
    save_detector(detector, FIXTURES / "detector.json")

    review = ReviewRecord(
        id=REVIEW_ID,
        sections=dict(SECTIONS),
        context=PlanContext(
            abstract=CONTEXT["abstract"],
            reviewer_summary=CONTEXT["summary"],
            reviewer_strengths=CONTEXT["strengths"],
        ),
    )
    dump_corpus([review], FIXTURES / "review.jsonl")

    # record pass: run the pipeline against the rule responder
    backend = RecordingBackend(respond)
    settings = PipelineSettings(
        registry=registry,
        templates=templates,
        prompts=prompts,
        gw_config=config.gateway,
        ga_config=config.ga,
        allow_generic_template=config.allow_generic_template,
    )
    from lazylint.pipeline import review_from_request

    record_review = review_from_request(REVIEW_ID, None, dict(SECTIONS), dict(CONTEXT))
    run_pipeline(record_review, detector, settings, LlmGateway(backend))
    (FIXTURES / "replay.json").write_text(
        json.dumps({"responses": backend.recorded}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    print(f"recorded {len(backend.recorded)} responses")

    # replay pass through the real CLI, twice, to freeze and check the golden
    argv = [
        "pipeline",
        "--detector", str(FIXTURES / "detector.json"),
        "--in", str(FIXTURES / "review.jsonl"),
        "--replay", str(FIXTURES / "replay.json"),
    ]
    golden = FIXTURES / "golden_pipeline.json"
    assert cli_main(argv + ["--out", str(golden)]) == 0
    again = FIXTURES / "golden_pipeline.check.json"
    assert cli_main(argv + ["--out", str(again)]) == 0
    if golden.read_bytes() != again.read_bytes():
        raise SystemExit("golden output is not stable across runs")
    again.unlink()
    print(f"golden written: {golden}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

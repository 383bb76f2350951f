"""Sentence splitting, tag parsing, segment assembly, and tag evaluation."""

import pytest

from lazylint.corpus import BioTag, Sentence
from lazylint.gateway import GatewayConfig
from lazylint.prompts import PromptSet
from lazylint.segmenter import (
    assemble_segments,
    evaluate_tags,
    parse_tag,
    repair_tags,
    segment_review,
    sentencize,
    sentencize_review,
    split_sentences,
    tag_bio,
    tag_request,
)

from conftest import make_review, rule_gateway


def test_split_six_sentence_paragraph_with_abbreviation():
    text = ("The method is unclear. Several baselines (e.g. BERT and T5) are "
            "missing. Why is Table 2 incomplete? Results look weak! See Sec. 3 "
            "for details. The authors should fix this.")
    assert split_sentences(text) == [
        "The method is unclear.",
        "Several baselines (e.g. BERT and T5) are missing.",
        "Why is Table 2 incomplete?",
        "Results look weak!",
        "See Sec. 3 for details.",
        "The authors should fix this.",
    ]


def test_split_handles_more_abbreviations():
    text = "Prior work, i.e. Smith et al. 2020, covers this. The delta is small."
    got = split_sentences(text)
    assert got == ["Prior work, i.e. Smith et al. 2020, covers this.",
                   "The delta is small."]


def test_split_keeps_enumerators_attached():
    text = "The paper has issues. 1. The proof is wrong. 2. The data is small."
    assert split_sentences(text) == [
        "The paper has issues.",
        "1. The proof is wrong.",
        "2. The data is small.",
    ]


def test_abbreviation_needs_word_boundary():
    assert split_sentences("We stop. Then we go.") == ["We stop.", "Then we go."]
    assert split_sentences("See p. 3 for the proof. The rest is fine.") == [
        "See p. 3 for the proof.", "The rest is fine."]


def test_split_newline_list_markers():
    text = "Concerns:\n- The loss is undefined\n- The speedup is unverified"
    got = split_sentences(text)
    assert len(got) == 3


def test_split_closing_punctuation():
    text = 'He said "stop." Then we continued.'
    assert split_sentences(text) == ['He said "stop."', "Then we continued."]


def test_split_empty_and_whitespace():
    assert split_sentences("") == []
    assert split_sentences("   \n  ") == []


def test_sentencize_assigns_indices_and_sections():
    sents = sentencize("One. Two.", section="weaknesses", start_index=3)
    assert [(s.index, s.section) for s in sents] == [(3, "weaknesses"), (4, "weaknesses")]


def test_sentencize_review_orders_sections():
    sents = sentencize_review("r1", {"summary": "Sum one.", "weaknesses": "Weak one."})
    assert sents[0].text == "Weak one."
    assert sents[0].section == "weaknesses"
    assert sents[1].text == "Sum one."
    assert [s.index for s in sents] == [0, 1]


def test_parse_tag_last_standalone_letter_wins():
    assert parse_tag("It begins a new point (B)") is BioTag.B
    assert parse_tag("B. No wait, I") is BioTag.I
    assert parse_tag("O") is BioTag.O


def test_parse_tag_garbage_is_outside():
    assert parse_tag("no tag here") is BioTag.O
    assert parse_tag("") is BioTag.O
    assert parse_tag("answer B2") is BioTag.O
    assert parse_tag("ABI") is BioTag.O


def test_parse_tag_ignores_lowercase():
    assert parse_tag("b") is BioTag.O
    assert parse_tag("the letter b, not B2x, so: I") is BioTag.I


def test_repair_tags_promotes_orphan_inside():
    tags = [BioTag.I, BioTag.I, BioTag.O, BioTag.I]
    assert repair_tags(tags) == [BioTag.B, BioTag.I, BioTag.O, BioTag.B]


def test_assemble_segments_hand_example():
    tags = [BioTag.B, BioTag.O, BioTag.I, BioTag.B, BioTag.I]
    assert assemble_segments(tags) == [(0, 0), (2, 2), (3, 4)]


def test_assemble_segments_edges():
    assert assemble_segments([]) == []
    assert assemble_segments([BioTag.O, BioTag.O]) == []
    assert assemble_segments([BioTag.B, BioTag.B]) == [(0, 0), (1, 1)]
    assert assemble_segments([BioTag.I]) == [(0, 0)]


def test_tag_bio_scripted(gw_config):
    review = make_review("r1", [
        ("First point.", "B", None),
        ("More on it.", "I", None),
        ("Thanks!", "O", None),
    ])
    answers = {"First point.": "B", "More on it.": "I", "Thanks!": "O"}

    def respond(request):
        body = request.messages[-1][1]
        sentence = body.split("Target sentence:\n", 1)[1].split("\n\nAnswer", 1)[0].strip()
        return "The tag is " + answers[sentence]

    gw = rule_gateway(respond)
    prompts = PromptSet.default()
    tags = tag_bio(review, gw, prompts, gw_config)
    assert [t.value for t in tags] == ["B", "I", "O"]
    tags2, segments = segment_review(review, gw, prompts, gw_config)
    assert tags2 == tags
    assert [(s.start, s.end) for s in segments] == [(0, 1)]
    assert segments[0].text == "First point. More on it."


def test_tag_request_embeds_sentence_and_review(gw_config):
    prompts = PromptSet.default()
    sentence = Sentence(index=0, text="The claim is vague.", section="weaknesses")
    req = tag_request(sentence, "Weaknesses:\nThe claim is vague.", prompts, gw_config)
    body = req.messages[-1][1]
    assert "The claim is vague." in body
    assert "single letter B, I, or O" in body


def test_evaluate_tags_hand_confusion():
    gold = [BioTag.parse(t) for t in "BIOOBIOOBB"]
    pred = [BioTag.parse(t) for t in "BIOBBOOOIB"]
    report = evaluate_tags(pred, gold)
    # hand counts: B gold rows 0,4,8,9 / pred rows 0,3,4,9 -> tp 3
    b = report.per_class["B"]
    assert b["precision"] == pytest.approx(3 / 4)
    assert b["recall"] == pytest.approx(3 / 4)
    i = report.per_class["I"]
    assert i["precision"] == pytest.approx(1 / 2)
    assert i["recall"] == pytest.approx(1 / 2)
    o = report.per_class["O"]
    assert o["precision"] == pytest.approx(3 / 4)
    assert o["recall"] == pytest.approx(3 / 4)
    # micro over single-tag-per-sentence data collapses to accuracy
    assert report.micro["f1"] == pytest.approx(7 / 10)
    assert report.micro["precision"] == pytest.approx(7 / 10)


def test_evaluate_tags_length_mismatch():
    with pytest.raises(ValueError):
        evaluate_tags([BioTag.B], [BioTag.B, BioTag.O])

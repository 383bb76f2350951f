"""Corpus loading, label registry rules, and record validation."""

import json

import pytest

from lazylint.corpus import (
    BioTag,
    CorpusError,
    IssueLabel,
    LabelKind,
    LabelRegistry,
    PlanContext,
    ReviewRecord,
    Segment,
    Sentence,
    corpus_stats,
    default_registry,
    dump_corpus,
    load_corpus,
    load_label_registry,
    record_to_dict,
)

from conftest import make_registry, make_review


def test_bio_tag_parse():
    assert BioTag.parse("B") is BioTag.B
    assert BioTag.parse("I") is BioTag.I
    assert BioTag.parse("O") is BioTag.O
    with pytest.raises(CorpusError):
        BioTag.parse("X")
    with pytest.raises(CorpusError):
        BioTag.parse("b")


def test_registry_rejects_duplicate_keys():
    labels = (
        IssueLabel(key="a", kind=LabelKind.LAZY, display="A"),
        IssueLabel(key="a", kind=LabelKind.LAZY, display="A again"),
        IssueLabel(key="none", kind=LabelKind.NONE, display="None"),
        IssueLabel(key="not-enough-info", kind=LabelKind.NOT_ENOUGH_INFO, display="NEI"),
    )
    with pytest.raises(CorpusError):
        LabelRegistry(labels=labels)


def test_registry_requires_reserved_labels():
    labels = (IssueLabel(key="a", kind=LabelKind.LAZY, display="A"),)
    with pytest.raises(CorpusError):
        LabelRegistry(labels=labels)


def test_registry_lookup_and_order():
    reg = make_registry(3)
    assert reg.index_of("lab-1") == 1
    assert reg.get("lab-2").display == "Issue 2"
    assert reg.none_key == "none"
    assert reg.not_enough_info_key == "not-enough-info"
    assert [lab.key for lab in reg.detectable()] == ["lab-0", "lab-1", "lab-2"]
    with pytest.raises(KeyError):
        reg.get("missing")


def test_validate_label_set_exclusivity():
    reg = make_registry(2)
    assert reg.validate_label_set(["lab-0", "lab-1"]) == {"lab-0", "lab-1"}
    assert reg.validate_label_set(["none"]) == {"none"}
    with pytest.raises(CorpusError):
        reg.validate_label_set(["none", "lab-0"])
    with pytest.raises(CorpusError):
        reg.validate_label_set(["nope"])


def test_default_registry_shape():
    reg = default_registry()
    assert len(reg) == 25
    kinds = {lab.kind for lab in reg}
    assert LabelKind.LAZY in kinds and LabelKind.SPECIFICITY in kinds
    assert len(list(reg.detectable())) == 23


def test_segment_from_sentences_joins_text():
    sents = [Sentence(index=i, text=f"S{i}.", section="weaknesses") for i in range(3)]
    seg = Segment.from_sentences("r1", sents, 1, 2)
    assert seg.text == "S1. S2."
    assert (seg.start, seg.end) == (1, 2)


def test_segment_range_validation():
    sents = [Sentence(index=0, text="Only one.", section="weaknesses")]
    with pytest.raises(CorpusError):
        Segment.from_sentences("r1", sents, 0, 1)
    with pytest.raises(CorpusError):
        Segment.from_sentences("r1", sents, -1, 0)


def test_review_record_validates_sentence_indices():
    bad = [Sentence(index=5, text="Wrong start.", section="weaknesses")]
    with pytest.raises(CorpusError):
        ReviewRecord(id="r1", sections={"weaknesses": "Wrong start."}, sentences=bad)


def test_review_record_validates_tag_length():
    sents = [Sentence(index=0, text="One.", section="weaknesses")]
    with pytest.raises(CorpusError):
        ReviewRecord(id="r1", sections={"weaknesses": "One."},
                     sentences=sents, tags=[BioTag.B, BioTag.O])


def test_section_order_puts_primary_sections_first():
    rec = ReviewRecord(
        id="r1",
        sections={"summary": "S.", "weaknesses": "W.", "comments": "C.", "apple": "A."},
    )
    assert rec.section_order() == ["weaknesses", "comments", "apple", "summary"]


def test_full_text_joins_named_sections():
    rec = ReviewRecord(id="r1", sections={"weaknesses": "W.", "summary": "S."})
    text = rec.full_text()
    assert "Weaknesses:\nW." in text
    assert text.index("Weaknesses:") < text.index("Summary:")


def test_corpus_round_trip(tmp_path):
    reg = make_registry(2)
    rec = make_review("r1", [
        ("The claim is vague.", "B", ["lab-0"]),
        ("It lacks citations.", "I", None),
        ("Thanks for the paper.", "O", None),
    ])
    path = tmp_path / "corpus.jsonl"
    dump_corpus([rec], path)
    loaded = load_corpus(path, reg)
    assert len(loaded) == 1
    got = loaded[0]
    assert got.id == "r1"
    assert [t.value for t in got.tags] == ["B", "I", "O"]
    assert got.segments[0].labels == {"lab-0"}
    assert got.segments[0].text == "The claim is vague. It lacks citations."
    assert record_to_dict(got) == record_to_dict(rec)


def test_load_corpus_header_is_optional(tmp_path):
    rec = {"id": "r9", "sections": {"weaknesses": "Too short."}}
    with_header = tmp_path / "a.jsonl"
    with_header.write_text(json.dumps({"format_version": "1"}) + "\n"
                           + json.dumps(rec) + "\n")
    bare = tmp_path / "b.jsonl"
    bare.write_text(json.dumps(rec) + "\n")
    assert load_corpus(with_header)[0].id == "r9"
    assert load_corpus(bare)[0].id == "r9"


def test_load_corpus_rejects_unknown_format_version(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps({"format_version": "99"}) + "\n")
    with pytest.raises(CorpusError, match="format_version"):
        load_corpus(path)


def test_load_corpus_rejects_duplicates_and_bad_json(tmp_path):
    rec = json.dumps({"id": "r1", "sections": {"weaknesses": "W."}})
    dup = tmp_path / "dup.jsonl"
    dup.write_text(rec + "\n" + rec + "\n")
    with pytest.raises(CorpusError, match="duplicate"):
        load_corpus(dup)
    bad = tmp_path / "bad.jsonl"
    bad.write_text(rec + "\n{nope\n")
    with pytest.raises(CorpusError, match="line 2"):
        load_corpus(bad)


def test_load_corpus_empty_file_is_empty_corpus(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert load_corpus(path) == []


def test_load_corpus_checks_labels_against_registry(tmp_path):
    reg = make_registry(1)
    path = tmp_path / "corpus.jsonl"
    path.write_text(json.dumps({
        "id": "r1",
        "sections": {"weaknesses": "Bad."},
        "sentences": [{"index": 0, "text": "Bad.", "section": "weaknesses"}],
        "segments": [{"start": 0, "end": 0, "labels": ["made-up"]}],
    }) + "\n")
    with pytest.raises(CorpusError, match="made-up"):
        load_corpus(path, reg)


def test_corpus_stats_hand_tally():
    recs = [
        make_review("r1", [
            ("A one.", "B", ["lab-0"]),
            ("A two.", "I", None),
            ("Off topic.", "O", None),
        ]),
        make_review("r2", [
            ("B one.", "B", ["lab-0", "lab-1"]),
            ("B two.", "B", ["none"]),
        ]),
    ]
    stats = corpus_stats(recs)
    assert stats.total_reviews == 2
    assert stats.total_sentences == 5
    assert stats.total_segments == 3
    assert stats.segment_length_hist == {1: 2, 2: 1}
    assert stats.labels_per_segment_hist == {1: 2, 2: 1}
    assert stats.label_freq == {"lab-0": 2, "lab-1": 1, "none": 1}


def test_corpus_stats_rejects_empty():
    with pytest.raises(CorpusError):
        corpus_stats([])


def test_load_label_registry_accepts_both_shapes(tmp_path):
    labels = [
        {"key": "a", "kind": "lazy", "display": "A"},
        {"key": "none", "kind": "none", "display": "None"},
        {"key": "not-enough-info", "kind": "not-enough-info", "display": "NEI"},
    ]
    bare = tmp_path / "bare.json"
    bare.write_text(json.dumps(labels))
    wrapped = tmp_path / "wrapped.json"
    wrapped.write_text(json.dumps(
        {"format_version": "1", "version": "v7", "labels": labels}))
    assert load_label_registry(bare).get("a").display == "A"
    assert load_label_registry(wrapped).version == "v7"


def test_plan_context_defaults():
    ctx = PlanContext()
    assert ctx.abstract == "" and ctx.reviewer_summary == "" and ctx.reviewer_strengths == ""

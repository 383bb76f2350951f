"""Detector training: threshold tuning, family selection, prediction, I/O."""

import random

import pytest

from lazylint.detector.families import ConstantModel, FAMILIES
from lazylint.detector.features import FeatureVector
from lazylint.detector.questions import QuestionBank
from lazylint.detector.training import (
    THRESHOLD_GRID,
    TrainingError,
    f_beta,
    load_detector,
    predict,
    save_detector,
    train_detector,
    tune_threshold,
)
from tests.conftest import make_registry


PER_LABEL = 2


def banks_for(registry):
    return {
        lab.key: QuestionBank(lab.key, tuple(f"{lab.key} q{j}?" for j in range(PER_LABEL)))
        for lab in registry.detectable()
    }


def vec(values, registry):
    return FeatureVector(values=tuple(values), registry_version=registry.version,
                         questions_per_label=PER_LABEL)


def separable_examples(registry, n=24, seed=5):
    """lab-k fires iff the first feature of block k is 1."""
    rng = random.Random(seed)
    detectable = [lab.key for lab in registry.detectable()]
    width = len(registry) * PER_LABEL
    examples = []
    for _ in range(n):
        values = [0] * width
        labels = set()
        for block, key in enumerate(detectable):
            hit = rng.random() < 0.45
            values[block * PER_LABEL] = 1 if hit else -1
            values[block * PER_LABEL + 1] = rng.choice((-1, 0, 1))
            if hit:
                labels.add(key)
        if not labels:
            labels = {"none"}
        examples.append((vec(values, registry), labels))
    return examples


def test_threshold_grid_shape():
    assert THRESHOLD_GRID[0] == 0.05
    assert THRESHOLD_GRID[-1] == 0.95
    assert len(THRESHOLD_GRID) == 19


def test_tune_threshold_hand_case():
    scores = [0.9, 0.8, 0.3, 0.1]
    gold = [1, 1, 0, 0]
    threshold, fb = tune_threshold(scores, gold, beta=0.5)
    # any cut in (0.3, 0.8] is perfect; ties resolve to the highest, 0.8
    assert threshold == 0.8
    assert fb == pytest.approx(1.0)


def test_tune_threshold_all_negative_gold():
    threshold, fb = tune_threshold([0.2, 0.6], [0, 0], beta=0.5)
    assert fb == 0.0
    assert threshold == THRESHOLD_GRID[-1]


def test_tune_threshold_prefers_precision_at_low_beta():
    # one noisy positive; beta=0.5 favors dropping it
    scores = [0.9, 0.85, 0.5, 0.45, 0.4]
    gold = [1, 1, 0, 1, 0]
    t_precise, _ = tune_threshold(scores, gold, beta=0.25)
    t_recall, _ = tune_threshold(scores, gold, beta=4.0)
    assert t_precise > t_recall


def test_train_detector_separable_reaches_perfect_fbeta():
    registry = make_registry(n_issues=3)
    banks = banks_for(registry)
    examples = separable_examples(registry, n=30)
    detector = train_detector(examples[:22], examples[22:], registry, banks, seed=7)
    assert detector.validation_fbeta == pytest.approx(1.0)
    assert detector.family in FAMILIES
    assert set(detector.thresholds) == {lab.key for lab in registry.detectable()}


def test_train_detector_prediction_roundtrip(tmp_path):
    registry = make_registry(n_issues=3)
    banks = banks_for(registry)
    examples = separable_examples(registry, n=30, seed=9)
    detector = train_detector(examples[:22], examples[22:], registry, banks, seed=7)

    path = tmp_path / "detector.json"
    save_detector(detector, path)
    clone = load_detector(path)
    assert clone.family == detector.family
    assert clone.thresholds == detector.thresholds
    assert clone.registry_version == detector.registry_version

    for vector, gold in examples[22:]:
        before = predict(vector, detector, registry)
        after = predict(vector, clone, registry)
        assert before.labels == after.labels
        assert before.labels == gold


def test_rare_label_gets_constant_model():
    registry = make_registry(n_issues=2)
    banks = banks_for(registry)
    width = len(registry) * PER_LABEL
    examples = []
    for i in range(12):
        values = [0] * width
        # lab-0 fires half the time; lab-1 has a single positive
        hit0 = i % 2 == 0
        values[0] = 1 if hit0 else -1
        labels = {"lab-0"} if hit0 else set()
        if i == 0:
            values[PER_LABEL] = 1
            labels.add("lab-1")
        examples.append((vec(values, registry), labels or {"none"}))
    detector = train_detector(examples[:9], examples[9:], registry, banks, seed=1)
    assert isinstance(detector.models["lab-1"], ConstantModel)
    assert detector.thresholds["lab-1"] == 0.95
    assert detector.models["lab-1"].score([0.0] * width) == 0.0


def test_family_tie_takes_first_listed():
    registry = make_registry(n_issues=1)
    banks = banks_for(registry)
    # trivially easy data: every family lands validation fbeta 1.0
    examples = []
    for i in range(16):
        hit = i % 2 == 0
        values = [1 if hit else -1] * PER_LABEL + [0] * (2 * PER_LABEL)
        examples.append((vec(values, registry), {"lab-0"} if hit else {"none"}))
    detector = train_detector(examples[:12], examples[12:], registry, banks, seed=0)
    assert detector.validation_fbeta == pytest.approx(1.0)
    assert detector.family == FAMILIES[0]


def test_predict_empty_decision_falls_back_to_none():
    registry = make_registry(n_issues=2)
    banks = banks_for(registry)
    examples = separable_examples(registry, n=20, seed=3)
    detector = train_detector(examples[:15], examples[15:], registry, banks, seed=2)
    width = len(registry) * PER_LABEL
    quiet = vec([-1] * (2 * PER_LABEL) + [0] * (width - 2 * PER_LABEL), registry)
    result = predict(quiet, detector, registry)
    assert result.labels == {"none"}
    assert not any(result.decisions.values())


def test_predict_rejects_mismatched_vector():
    registry = make_registry(n_issues=2)
    banks = banks_for(registry)
    examples = separable_examples(registry, n=20, seed=4)
    detector = train_detector(examples[:15], examples[15:], registry, banks, seed=2)
    alien = FeatureVector(values=(0,) * 8, registry_version="other-reg",
                          questions_per_label=PER_LABEL)
    with pytest.raises(TrainingError, match="registry"):
        predict(alien, detector, registry)
    short = FeatureVector(values=(0,) * PER_LABEL, registry_version=registry.version,
                          questions_per_label=PER_LABEL)
    with pytest.raises(TrainingError, match="length"):
        predict(short, detector, registry)


def test_train_detector_validates_inputs():
    registry = make_registry(n_issues=2)
    banks = banks_for(registry)
    examples = separable_examples(registry, n=8, seed=1)
    with pytest.raises(TrainingError):
        train_detector([], examples, registry, banks)
    with pytest.raises(TrainingError):
        train_detector(examples, examples, registry, banks, families=("mlp",))
    with pytest.raises(TrainingError):
        train_detector(examples, examples, registry, banks, beta=0.0)
    wrong = [(FeatureVector((0,) * 4, "other", PER_LABEL), {"lab-0"})]
    with pytest.raises(TrainingError):
        train_detector(wrong, examples, registry, banks)


def test_load_detector_rejects_bad_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    with pytest.raises(TrainingError):
        load_detector(bad)
    wrong = tmp_path / "wrong.json"
    wrong.write_text('{"format_version": "0"}')
    with pytest.raises(TrainingError):
        load_detector(wrong)


def test_f_beta_matches_evalkit_twin():
    from lazylint.evalkit import f_beta as eval_f_beta
    for p, r, b in [(0.42, 0.67, 2.0), (0.9, 0.25, 0.5), (0.0, 0.0, 1.0)]:
        assert f_beta(p, r, b) == eval_f_beta(p, r, b)

"""Metric primitives: F-beta, grids, agreement, and distribution distance."""

import json
import math
from collections import Counter

import pytest

from lazylint.evalkit import (
    CountedOutcomes,
    EvalError,
    FBetaGridReport,
    f_beta,
    fbeta_grid,
    krippendorff_alpha,
    label_distribution_distance,
    precision_recall,
)


def test_f_beta_printed_operating_point():
    assert f_beta(0.42, 0.67, 2.0) == pytest.approx(0.60, abs=0.005)


def test_f_beta_formula_oracle():
    for p, r, beta in [(0.3, 0.9, 0.5), (0.5, 0.5, 1.0), (0.9, 0.25, 0.25)]:
        expected = (1 + beta**2) * p * r / (beta**2 * p + r)
        assert f_beta(p, r, beta) == pytest.approx(expected, abs=1e-12)


def test_f_beta_zero_denominator():
    assert f_beta(0.0, 0.0, 0.5) == 0.0


def test_f_beta_validates_inputs():
    with pytest.raises(ValueError):
        f_beta(-0.1, 0.5, 1.0)
    with pytest.raises(ValueError):
        f_beta(0.5, 1.1, 1.0)
    with pytest.raises(ValueError):
        f_beta(0.5, 0.5, 0.0)


def test_f1_is_harmonic_mean():
    assert f_beta(0.5, 1.0, 1.0) == pytest.approx(2 / 3)


def test_counted_outcomes_add_and_validate():
    a = CountedOutcomes(1, 2, 3)
    b = CountedOutcomes(4, 0, 1)
    s = a + b
    assert (s.tp, s.fp, s.fn) == (5, 2, 4)
    with pytest.raises(EvalError):
        CountedOutcomes(-1, 0, 0)


def test_precision_recall_hand_values():
    assert precision_recall(CountedOutcomes(9, 1, 27)) == (0.9, 0.25)
    assert precision_recall(CountedOutcomes(0, 0, 0)) == (0.0, 0.0)
    assert precision_recall(CountedOutcomes(0, 5, 0)) == (0.0, 0.0)


def test_fbeta_grid_hand_f05():
    counts = CountedOutcomes(8, 2, 4)  # p = 0.8, r = 2/3
    report = fbeta_grid(counts, betas=(0.5,))
    p, r = 0.8, 2 / 3
    expected = (1 + 0.25) * p * r / (0.25 * p + r)
    assert report.scores[0.5] == pytest.approx(expected)
    assert report.precision == pytest.approx(p)
    assert report.recall == pytest.approx(r)


def test_fbeta_grid_monotone_consistency():
    counts = CountedOutcomes(8, 2, 4)  # r < p so fbeta falls as beta rises
    report = fbeta_grid(counts)
    betas = list(report.scores)
    assert betas == sorted(betas)
    values = [report.scores[b] for b in betas]
    assert all(values[i] >= values[i + 1] - 1e-12 for i in range(len(values) - 1))


def test_fbeta_grid_report_renders():
    report = fbeta_grid(CountedOutcomes(3, 1, 2))
    text = report.to_text()
    assert "beta" in text and "precision=" in text
    parsed = json.loads(report.to_json())
    assert parsed["precision"] == pytest.approx(0.75)
    assert "0.5" in parsed["scores"]


def test_alpha_perfect_agreement():
    units = [("x", "x"), ("y", "y"), ("x", "x"), ("z", "z")]
    assert krippendorff_alpha(units) == pytest.approx(1.0)


def test_alpha_balanced_hand_example_is_zero():
    units = [("x", "x"), ("x", "y"), ("y", "x"), ("y", "y")]
    assert krippendorff_alpha(units) == pytest.approx(0.0, abs=1e-9)


def test_alpha_ten_unit_formula_oracle():
    units = [
        ("a", "a"), ("a", "a"), ("a", "b"), ("b", "b"), ("b", "b"),
        ("b", "a"), ("a", "a"), ("b", "b"), ("a", "b"), ("b", "b"),
    ]
    # independent oracle: build the coincidence matrix by hand
    pairs = Counter()
    for left, right in units:
        pairs[(left, right)] += 1
        pairs[(right, left)] += 1
    n = sum(pairs.values())
    marginals = Counter()
    for (a, _), count in pairs.items():
        marginals[a] += count
    d_o = sum(c for (a, b), c in pairs.items() if a != b) / n
    d_e = sum(marginals[a] * marginals[b]
              for a in marginals for b in marginals if a != b) / (n * n)
    expected = 1.0 - d_o / d_e
    assert krippendorff_alpha(units) == pytest.approx(expected, abs=1e-9)


def test_alpha_requires_enough_data():
    with pytest.raises(EvalError):
        krippendorff_alpha([("x", "x")])
    with pytest.raises(EvalError):
        krippendorff_alpha([("x", "x"), ("x", "x")])


def test_distribution_distance_hand_value():
    assert label_distribution_distance({"a": 3, "b": 1}, {"a": 1, "b": 3}) == 0.5


def test_distribution_distance_identical_and_disjoint():
    assert label_distribution_distance({"a": 2}, {"a": 7}) == 0.0
    assert label_distribution_distance({"a": 1}, {"b": 1}) == 1.0


def test_distribution_distance_accepts_iterables():
    assert label_distribution_distance(["a", "a", "b"], ["a", "a", "b"]) == 0.0


def test_distribution_distance_union_support():
    got = label_distribution_distance({"a": 1, "b": 1}, {"a": 1, "c": 1})
    assert got == pytest.approx(0.5)


def test_distribution_distance_rejects_empty():
    with pytest.raises(EvalError):
        label_distribution_distance({}, {"a": 1})
    with pytest.raises(EvalError):
        label_distribution_distance({"a": -1, "b": 2}, {"a": 1})


def test_alpha_shift_between_disagreement_levels():
    mild = [("x", "x")] * 8 + [("x", "y")] * 2
    harsh = [("x", "x")] * 5 + [("x", "y")] * 5
    assert krippendorff_alpha(mild) > krippendorff_alpha(harsh)

"""One-vs-rest detector training, threshold tuning, and persistence.

Precision-first stance throughout: thresholds maximize per-label F(beta) with
beta defaulting to 0.5, the winning family maximizes the micro-averaged score,
and score ties resolve toward the more conservative choice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from ..corpus import LabelRegistry
from .families import FAMILIES, ConstantModel, Model, fit_family, model_from_dict
from .features import FeatureVector, check_banks
from .questions import QuestionBank

FORMAT_VERSION = "1"
DEFAULT_BETA = 0.5
MIN_POSITIVES = 2

# 0.05 .. 0.95 in steps of 0.05
THRESHOLD_GRID = tuple(round(i * 0.05, 2) for i in range(1, 20))


class TrainingError(ValueError):
    pass


def f_beta(precision: float, recall: float, beta: float) -> float:
    """(1 + b^2) * p * r / (b^2 * p + r); 0 when the denominator is 0."""
    if not 0.0 <= precision <= 1.0 or not 0.0 <= recall <= 1.0:
        raise ValueError(f"precision/recall must lie in [0, 1]: {precision}, {recall}")
    if beta <= 0.0:
        raise ValueError(f"beta must be positive: {beta}")
    b2 = beta * beta
    denom = b2 * precision + recall
    if denom == 0.0:
        return 0.0
    return (1.0 + b2) * precision * recall / denom


Example = tuple[FeatureVector, set[str]]


@dataclass(slots=True)
class TrainedDetector:
    family: str
    seed: int
    beta_target: float
    registry_version: str
    thresholds: dict[str, float]
    models: dict[str, Model]
    question_banks: dict[str, QuestionBank]
    validation_fbeta: float = 0.0  # informational, not persisted
    per_label_fbeta: dict[str, float] = field(default_factory=dict)  # informational

    def questions_per_label(self) -> int:
        sizes = {b.size for b in self.question_banks.values()}
        if len(sizes) != 1:
            raise TrainingError(f"banks disagree on size: {sorted(sizes)}")
        return sizes.pop()

    def score_all(self, vector: FeatureVector) -> dict[str, float]:
        return {key: model.score(vector.values) for key, model in self.models.items()}


@dataclass(slots=True)
class PredictionResult:
    scores: dict[str, float]
    decisions: dict[str, bool]
    labels: set[str]


def _check_examples(name: str, examples: Sequence[Example], registry: LabelRegistry,
                    expected_len: int) -> None:
    if not examples:
        raise TrainingError(f"{name} set must be non-empty")
    for i, (vec, labels) in enumerate(examples):
        if vec.registry_version != registry.version:
            raise TrainingError(
                f"{name}[{i}]: registry version {vec.registry_version!r} does not match "
                f"{registry.version!r}")
        if len(vec.values) != expected_len:
            raise TrainingError(
                f"{name}[{i}]: vector length {len(vec.values)}, expected {expected_len}")
        registry.validate_label_set(labels, where=f"{name}[{i}]")


def tune_threshold(scores: Sequence[float], gold: Sequence[int], beta: float,
                   grid: Sequence[float] = THRESHOLD_GRID) -> tuple[float, float]:
    """(threshold, f_beta) maximizing per-label F(beta); ties pick the highest
    threshold.  A label with no gold positives scores 0 everywhere."""
    best_t, best_f = grid[0], -1.0
    for t in grid:
        tp = fp = fn = 0
        for s, g in zip(scores, gold):
            fired = s >= t
            if fired and g:
                tp += 1
            elif fired:
                fp += 1
            elif g:
                fn += 1
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        fb = f_beta(precision, recall, beta)
        if fb >= best_f:  # >= so later (higher) thresholds win ties
            best_t, best_f = t, fb
    return best_t, best_f


def train_detector(train: Sequence[Example], valid: Sequence[Example],
                   registry: LabelRegistry, banks: Mapping[str, QuestionBank],
                   families: Sequence[str] = FAMILIES, beta: float = DEFAULT_BETA,
                   seed: int = 0) -> TrainedDetector:
    if beta <= 0:
        raise TrainingError("beta must be positive")
    unknown = [f for f in families if f not in FAMILIES]
    if unknown:
        raise TrainingError(f"unknown families {unknown}; known: {list(FAMILIES)}")
    if not families:
        raise TrainingError("at least one family required")
    per_label = check_banks(banks, registry)
    expected_len = len(registry) * per_label
    _check_examples("train", train, registry, expected_len)
    _check_examples("valid", valid, registry, expected_len)

    detectable = [lab.key for lab in registry.detectable()]
    X_train = [vec.values for vec, _ in train]
    X_valid = [vec.values for vec, _ in valid]
    y_train = {key: [1 if key in labels else 0 for _, labels in train] for key in detectable}
    y_valid = {key: [1 if key in labels else 0 for _, labels in valid] for key in detectable}

    best: TrainedDetector | None = None
    for family in families:
        models: dict[str, Model] = {}
        thresholds: dict[str, float] = {}
        per_label_fb: dict[str, float] = {}
        tp = fp = fn = 0
        for key in detectable:
            if sum(y_train[key]) < MIN_POSITIVES:
                # too few positives to generalize from: always-negative model
                models[key] = ConstantModel(0.0)
                thresholds[key] = THRESHOLD_GRID[-1]
                per_label_fb[key] = 0.0
                fn += sum(y_valid[key])
                continue
            model = fit_family(family, X_train, y_train[key], seed)
            scores = [model.score(x) for x in X_valid]
            threshold, fb = tune_threshold(scores, y_valid[key], beta)
            models[key] = model
            thresholds[key] = threshold
            per_label_fb[key] = fb
            for s, g in zip(scores, y_valid[key]):
                fired = s >= threshold
                if fired and g:
                    tp += 1
                elif fired:
                    fp += 1
                elif g:
                    fn += 1
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        micro = f_beta(precision, recall, beta)
        candidate = TrainedDetector(
            family=family, seed=seed, beta_target=beta, registry_version=registry.version,
            thresholds=thresholds, models=models, question_banks=dict(banks),
            validation_fbeta=micro, per_label_fbeta=per_label_fb,
        )
        # strict > keeps the earliest-listed family on ties
        if best is None or micro > best.validation_fbeta:
            best = candidate
    assert best is not None
    return best


def predict(vector: FeatureVector, detector: TrainedDetector,
            registry: LabelRegistry) -> PredictionResult:
    if vector.registry_version != detector.registry_version:
        raise TrainingError(
            f"feature vector registry {vector.registry_version!r} does not match "
            f"detector registry {detector.registry_version!r}")
    expected_len = len(registry) * detector.questions_per_label()
    if len(vector.values) != expected_len:
        raise TrainingError(
            f"vector length {len(vector.values)}, detector expects {expected_len}")
    scores = detector.score_all(vector)
    decisions = {key: scores[key] >= detector.thresholds[key] for key in scores}
    labels = {key for key, fired in decisions.items() if fired}
    if not labels:
        labels = {registry.none_key}
    return PredictionResult(scores=scores, decisions=decisions, labels=labels)


def detector_to_dict(detector: TrainedDetector) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "family": detector.family,
        "seed": detector.seed,
        "beta_target": detector.beta_target,
        "registry_version": detector.registry_version,
        "thresholds": dict(sorted(detector.thresholds.items())),
        "models": {key: model.to_dict() for key, model in sorted(detector.models.items())},
        "question_banks": {
            key: list(bank.questions)
            for key, bank in sorted(detector.question_banks.items())
        },
    }


def save_detector(detector: TrainedDetector, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(detector_to_dict(detector), indent=2, sort_keys=True,
                   ensure_ascii=False) + "\n",
        encoding="utf-8")


def load_detector(path: str | Path) -> TrainedDetector:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TrainingError(f"detector file {path} is not valid JSON: {exc}") from exc
    declared = data.get("format_version")
    if declared != FORMAT_VERSION:
        raise TrainingError(
            f"unsupported detector format_version {declared!r} (expected {FORMAT_VERSION!r})")
    try:
        models = {key: model_from_dict(m) for key, m in data["models"].items()}
        thresholds = {key: float(t) for key, t in data["thresholds"].items()}
        banks = {
            key: QuestionBank(label_key=key, questions=tuple(qs))
            for key, qs in data["question_banks"].items()
        }
        detector = TrainedDetector(
            family=data["family"],
            seed=int(data["seed"]),
            beta_target=float(data["beta_target"]),
            registry_version=str(data["registry_version"]),
            thresholds=thresholds,
            models=models,
            question_banks=banks,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise TrainingError(f"malformed detector file {path}: {exc}") from exc
    if set(detector.models) != set(detector.thresholds):
        raise TrainingError("models and thresholds cover different label sets")
    for key, t in detector.thresholds.items():
        if not 0.0 <= t <= 1.0:
            raise TrainingError(f"threshold for {key!r} outside [0, 1]: {t}")
    detector.questions_per_label()  # validates bank agreement
    return detector

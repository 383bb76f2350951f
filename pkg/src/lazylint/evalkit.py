"""Shared evaluation primitives: counted outcomes, F-beta grids, agreement, drift.

``f_beta`` itself lives with the detector (threshold tuning and family selection
are defined in terms of it) and is re-exported here.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .detector.training import f_beta

__all__ = [
    "CountedOutcomes",
    "precision_recall",
    "f_beta",
    "fbeta_grid",
    "FBetaGridReport",
    "krippendorff_alpha",
    "label_distribution_distance",
]

DEFAULT_BETAS = (0.25, 0.5, 0.75, 1.0, 2.0)


class EvalError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class CountedOutcomes:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise EvalError("outcome counts must be non-negative")

    def __add__(self, other: "CountedOutcomes") -> "CountedOutcomes":
        return CountedOutcomes(self.tp + other.tp, self.fp + other.fp,
                               self.fn + other.fn, self.tn + other.tn)


def precision_recall(counts: CountedOutcomes) -> tuple[float, float]:
    """(precision, recall); zero denominators yield 0.0, never an exception."""
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    return precision, recall


@dataclass(slots=True)
class FBetaGridReport:
    precision: float
    recall: float
    scores: dict[float, float]  # beta -> f_beta

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "scores": {str(b): s for b, s in self.scores.items()},
        }

    def to_text(self) -> str:
        lines = [f"{'beta':>8}  {'f_beta':>8}"]
        for beta, score in self.scores.items():
            lines.append(f"{beta:>8.2f}  {score:>8.4f}")
        lines.append(f"precision={self.precision:.4f} recall={self.recall:.4f}")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def fbeta_grid(counts: CountedOutcomes,
               betas: Sequence[float] = DEFAULT_BETAS) -> FBetaGridReport:
    precision, recall = precision_recall(counts)
    scores = {float(b): f_beta(precision, recall, float(b)) for b in betas}
    return FBetaGridReport(precision=precision, recall=recall, scores=scores)


def krippendorff_alpha(units: Sequence[tuple[Hashable, Hashable]]) -> float:
    """Nominal-scale alpha for two raters with no missing values.

    alpha = 1 - D_o / D_e over the coincidence matrix.  Chance disagreement D_e
    uses the label marginals directly (n^2 denominator), so fully balanced
    random assignment scores exactly 0.
    """
    if len(units) < 2:
        raise EvalError("krippendorff_alpha needs at least 2 units")
    coincidences: Counter[tuple[Hashable, Hashable]] = Counter()
    for a, b in units:
        coincidences[(a, b)] += 1
        coincidences[(b, a)] += 1
    marginals: Counter[Hashable] = Counter()
    for (a, _b), count in coincidences.items():
        marginals[a] += count
    if len(marginals) < 2:
        raise EvalError("alpha undefined: fewer than 2 distinct values")
    n = sum(marginals.values())
    observed = sum(count for (a, b), count in coincidences.items() if a != b) / n
    expected = sum(
        marginals[a] * marginals[b] for a in marginals for b in marginals if a != b
    ) / (n * n)
    if expected == 0.0:
        raise EvalError("alpha undefined: no expected disagreement")
    return 1.0 - observed / expected


def label_distribution_distance(train: Mapping[str, int] | Iterable[str],
                                test: Mapping[str, int] | Iterable[str]) -> float:
    """Total variation distance between two normalized label multisets."""
    p = Counter(dict(train)) if isinstance(train, Mapping) else Counter(train)
    q = Counter(dict(test)) if isinstance(test, Mapping) else Counter(test)
    if sum(p.values()) <= 0 or sum(q.values()) <= 0:
        raise EvalError("label_distribution_distance needs non-empty multisets")
    if min(p.values()) < 0 or min(q.values()) < 0:
        raise EvalError("label counts must be non-negative")
    p_total = sum(p.values())
    q_total = sum(q.values())
    support = set(p) | set(q)
    return 0.5 * sum(abs(p[k] / p_total - q[k] / q_total) for k in support)

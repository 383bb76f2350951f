"""Label-stratified review-level splits.

Greedy largest-first assignment: reviews are ordered by descending total
segment-label count (ties shuffled by the seed), and each goes to the
capacity-eligible part where the resulting worst-case distribution drift,
max over parts of label_distribution_distance(part, global), is smallest.
Whole reviews move together so sentence- and segment-level leakage across
parts is impossible.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import ReviewRecord
from .evalkit import label_distribution_distance

FORMAT_VERSION = "1"


class SplitError(ValueError):
    pass


@dataclass(slots=True)
class SplitResult:
    seed: int
    names: list[str]
    parts: list[list[str]]  # review ids per part
    distances: list[float]

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "seed": self.seed,
            "parts": [
                {"name": name, "review_ids": ids}
                for name, ids in zip(self.names, self.parts)
            ],
            "distances": self.distances,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_split(path: str | Path) -> SplitResult:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    declared = data.get("format_version")
    if declared != FORMAT_VERSION:
        raise SplitError(
            f"unsupported split format_version {declared!r} (expected {FORMAT_VERSION!r})")
    return SplitResult(
        seed=int(data["seed"]),
        names=[p["name"] for p in data["parts"]],
        parts=[list(p["review_ids"]) for p in data["parts"]],
        distances=[float(d) for d in data["distances"]],
    )


def review_label_counts(record: ReviewRecord) -> Counter[str]:
    counts: Counter[str] = Counter()
    for seg in record.segments or []:
        counts.update(seg.labels)
    return counts


def _part_distance(part: Counter[str], global_counts: Counter[str]) -> float:
    if sum(global_counts.values()) == 0:
        return 0.0  # unlabeled corpus: nothing to stratify on
    if sum(part.values()) == 0:
        return 1.0  # empty part is maximally far from the global distribution
    return label_distribution_distance(part, global_counts)


def split_reviews(records: Sequence[ReviewRecord], fractions: Sequence[float],
                  seed: int = 0, names: Sequence[str] | None = None) -> SplitResult:
    if not fractions:
        raise SplitError("at least one fraction required")
    if any(f <= 0 for f in fractions):
        raise SplitError(f"fractions must be positive: {list(fractions)}")
    if abs(sum(fractions) - 1.0) > 1e-6:
        raise SplitError(f"fractions must sum to 1: {list(fractions)}")
    if len(records) < len(fractions):
        raise SplitError(
            f"cannot cut {len(records)} reviews into {len(fractions)} parts")
    if names is None:
        names = [f"part-{i}" for i in range(len(fractions))]
    elif len(names) != len(fractions):
        raise SplitError("names must align with fractions")

    n = len(records)
    capacities = [f * n for f in fractions]
    per_review = {rec.id: review_label_counts(rec) for rec in records}
    global_counts: Counter[str] = Counter()
    for counts in per_review.values():
        global_counts.update(counts)

    rng = random.Random(seed)
    order = list(records)
    rng.shuffle(order)
    order.sort(key=lambda rec: -sum(per_review[rec.id].values()))  # stable: ties stay shuffled

    part_ids: list[list[str]] = [[] for _ in fractions]
    part_counts: list[Counter[str]] = [Counter() for _ in fractions]
    for rec in order:
        eligible = [i for i in range(len(fractions)) if len(part_ids[i]) < capacities[i]]
        if not eligible:  # impossible while capacities sum to n; guard anyway
            raise SplitError("no eligible part during assignment")
        best_i = None
        best_key: tuple[float, float, int] | None = None
        for i in eligible:
            trial = part_counts[i] + per_review[rec.id]
            worst = max(
                _part_distance(trial if j == i else part_counts[j], global_counts)
                for j in range(len(fractions))
            )
            fill = (len(part_ids[i]) + 1) / capacities[i]
            key = (worst, fill, i)
            if best_key is None or key < best_key:
                best_key = key
                best_i = i
        assert best_i is not None
        part_ids[best_i].append(rec.id)
        part_counts[best_i].update(per_review[rec.id])

    distances = [_part_distance(part_counts[i], global_counts) for i in range(len(fractions))]
    return SplitResult(seed=seed, names=list(names), parts=part_ids, distances=distances)


def kfold(records: Sequence[ReviewRecord], k: int, seed: int = 0) -> SplitResult:
    if k < 2:
        raise SplitError(f"k must be >= 2, got {k}")
    if k > len(records):
        raise SplitError(f"cannot cut {len(records)} reviews into {k} folds")
    fractions = [1.0 / k] * k
    result = split_reviews(records, fractions, seed=seed,
                           names=[f"fold-{i}" for i in range(k)])
    return result

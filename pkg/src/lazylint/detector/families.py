"""Classical classifier families for one-vs-rest issue detection.

All five families are implemented here directly so that persisted models are
fully described by the JSON schema (tree nodes as {feature, cut, left, right}
or {leaf: positive_fraction}) and reload identically anywhere.

Scores are in [0, 1]:
  * forests: fraction of trees voting positive (a tree votes positive when its
    leaf's positive fraction exceeds 0.5),
  * knn: fraction of the k nearest training points that are positive,
  * logreg: sigmoid of the linear score,
  * decision-tree: the leaf's positive fraction.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

FAMILIES = ("extra-trees", "random-forest", "knn", "logreg", "decision-tree")

DEFAULT_N_TREES = 100
DEFAULT_K_NEIGHBORS = 5
DEFAULT_L2 = 0.01
DEFAULT_EPOCHS = 300


class FamilyError(ValueError):
    pass


def _gini(pos: float, total: float) -> float:
    if total <= 0:
        return 0.0
    p = pos / total
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _weighted_child_gini(y_node: np.ndarray, left_mask: np.ndarray) -> float:
    n = y_node.size
    nl = int(left_mask.sum())
    nr = n - nl
    if nl == 0 or nr == 0:
        return math.inf  # degenerate split, never chosen
    pos_l = float(y_node[left_mask].sum())
    pos_r = float(y_node.sum()) - pos_l
    return (nl * _gini(pos_l, nl) + nr * _gini(pos_r, nr)) / n


def _leaf(y_node: np.ndarray) -> dict:
    return {"leaf": float(y_node.mean())}


def _grow_extra_tree(X: np.ndarray, y: np.ndarray, rows: np.ndarray,
                     rng: random.Random, k: int) -> dict:
    y_node = y[rows]
    if rows.size < 2 or y_node.min() == y_node.max():
        return _leaf(y_node)
    sub = X[rows]
    mins = sub.min(axis=0)
    maxs = sub.max(axis=0)
    eligible = np.nonzero(maxs > mins)[0]
    if eligible.size == 0:
        return _leaf(y_node)
    candidates = rng.sample(list(eligible), min(k, int(eligible.size)))
    best_score = math.inf
    best: tuple[int, float, np.ndarray] | None = None
    for f in candidates:
        # one uniform cut per candidate, drawn inside the node's value range;
        # left = (x <= cut) keeps both sides non-empty for cut in [min, max)
        cut = float(mins[f]) + rng.random() * (float(maxs[f]) - float(mins[f]))
        left_mask = sub[:, f] <= cut
        score = _weighted_child_gini(y_node, left_mask)
        if score < best_score:
            best_score = score
            best = (int(f), cut, left_mask)
    if best is None or not math.isfinite(best_score):
        return _leaf(y_node)
    f, cut, left_mask = best
    return {
        "feature": f,
        "cut": cut,
        "left": _grow_extra_tree(X, y, rows[left_mask], rng, k),
        "right": _grow_extra_tree(X, y, rows[~left_mask], rng, k),
    }


def _best_exhaustive_split(sub: np.ndarray, y_node: np.ndarray,
                           features: Sequence[int]) -> tuple[float, int, float] | None:
    best: tuple[float, int, float] | None = None
    for f in features:
        values = np.unique(sub[:, f])
        if values.size < 2:
            continue
        for cut in (values[:-1] + values[1:]) / 2.0:
            score = _weighted_child_gini(y_node, sub[:, f] <= cut)
            if best is None or score < best[0] - 1e-12:
                best = (float(score), int(f), float(cut))
    return best


def _grow_rf_tree(X: np.ndarray, y: np.ndarray, rows: np.ndarray,
                  rng: random.Random, k: int) -> dict:
    y_node = y[rows]
    if rows.size < 2 or y_node.min() == y_node.max():
        return _leaf(y_node)
    sub = X[rows]
    mins = sub.min(axis=0)
    maxs = sub.max(axis=0)
    eligible = np.nonzero(maxs > mins)[0]
    if eligible.size == 0:
        return _leaf(y_node)
    candidates = rng.sample(list(eligible), min(k, int(eligible.size)))
    best = _best_exhaustive_split(sub, y_node, candidates)
    if best is None:
        return _leaf(y_node)
    _, f, cut = best
    left_mask = sub[:, f] <= cut
    return {
        "feature": f,
        "cut": cut,
        "left": _grow_rf_tree(X, y, rows[left_mask], rng, k),
        "right": _grow_rf_tree(X, y, rows[~left_mask], rng, k),
    }


def _tree_leaf_value(node: dict, x: np.ndarray) -> float:
    while "leaf" not in node:
        node = node["left"] if x[node["feature"]] <= node["cut"] else node["right"]
    return node["leaf"]


def _validate_node(node: dict, dim: int) -> None:
    if "leaf" in node:
        frac = node["leaf"]
        if not 0.0 <= frac <= 1.0:
            raise FamilyError(f"leaf positive fraction {frac} outside [0, 1]")
        return
    if not {"feature", "cut", "left", "right"} <= node.keys():
        raise FamilyError(f"malformed tree node: {sorted(node.keys())}")
    if not 0 <= node["feature"] < dim:
        raise FamilyError(f"tree references feature {node['feature']} of {dim}")
    _validate_node(node["left"], dim)
    _validate_node(node["right"], dim)


@dataclass(slots=True)
class ForestModel:
    trees: list[dict]
    dim: int
    kind: str = "forest"

    def score(self, x: Sequence[float]) -> float:
        xv = np.asarray(x, dtype=np.float64)
        votes = sum(1 for t in self.trees if _tree_leaf_value(t, xv) > 0.5)
        return votes / len(self.trees)

    def to_dict(self) -> dict:
        return {"kind": "forest", "dim": self.dim, "trees": self.trees}

    @classmethod
    def from_dict(cls, data: dict) -> "ForestModel":
        trees = data["trees"]
        if not trees:
            raise FamilyError("forest must hold at least one tree")
        for t in trees:
            _validate_node(t, data["dim"])
        return cls(trees=trees, dim=int(data["dim"]))


@dataclass(slots=True)
class TreeModel:
    root: dict
    dim: int
    kind: str = "tree"

    def score(self, x: Sequence[float]) -> float:
        return _tree_leaf_value(self.root, np.asarray(x, dtype=np.float64))

    def to_dict(self) -> dict:
        return {"kind": "tree", "dim": self.dim, "root": self.root}

    @classmethod
    def from_dict(cls, data: dict) -> "TreeModel":
        _validate_node(data["root"], data["dim"])
        return cls(root=data["root"], dim=int(data["dim"]))


@dataclass(slots=True)
class KnnModel:
    points: np.ndarray
    labels: np.ndarray
    k: int
    kind: str = "knn"

    def score(self, x: Sequence[float]) -> float:
        xv = np.asarray(x, dtype=np.float64)
        dists = ((self.points - xv) ** 2).sum(axis=1)
        # ties on distance resolve to the lower training index
        order = np.lexsort((np.arange(dists.size), dists))
        k_eff = min(self.k, dists.size)
        return float(self.labels[order[:k_eff]].mean())

    def to_dict(self) -> dict:
        return {"kind": "knn", "k": self.k,
                "points": self.points.tolist(), "labels": self.labels.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "KnnModel":
        points = np.asarray(data["points"], dtype=np.float64)
        labels = np.asarray(data["labels"], dtype=np.float64)
        if points.ndim != 2 or points.shape[0] != labels.shape[0] or points.shape[0] == 0:
            raise FamilyError("knn model needs matching non-empty points and labels")
        if int(data["k"]) < 1:
            raise FamilyError("knn k must be >= 1")
        return cls(points=points, labels=labels, k=int(data["k"]))


@dataclass(slots=True)
class LogRegModel:
    weights: np.ndarray
    intercept: float
    kind: str = "logreg"
    loss_history: list[float] = field(default_factory=list)

    def score(self, x: Sequence[float]) -> float:
        z = float(np.dot(self.weights, np.asarray(x, dtype=np.float64)) + self.intercept)
        if z >= 0:
            return 1.0 / (1.0 + math.exp(-z))
        ez = math.exp(z)
        return ez / (1.0 + ez)

    def to_dict(self) -> dict:
        return {"kind": "logreg", "weights": self.weights.tolist(),
                "intercept": float(self.intercept)}

    @classmethod
    def from_dict(cls, data: dict) -> "LogRegModel":
        return cls(weights=np.asarray(data["weights"], dtype=np.float64),
                   intercept=float(data["intercept"]))


@dataclass(slots=True)
class ConstantModel:
    value: float = 0.0
    kind: str = "constant"

    def score(self, x: Sequence[float]) -> float:
        return self.value

    def to_dict(self) -> dict:
        return {"kind": "constant", "value": self.value}

    @classmethod
    def from_dict(cls, data: dict) -> "ConstantModel":
        return cls(value=float(data["value"]))


Model = ForestModel | TreeModel | KnnModel | LogRegModel | ConstantModel


def _as_arrays(X: Sequence[Sequence[float]], y: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    Xa = np.asarray(X, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if Xa.ndim != 2 or Xa.shape[0] == 0:
        raise FamilyError("training data must be a non-empty 2d matrix")
    if ya.shape != (Xa.shape[0],):
        raise FamilyError("labels must align with training rows")
    if not np.isin(ya, (0.0, 1.0)).all():
        raise FamilyError("labels must be 0/1")
    return Xa, ya


def fit_extra_trees(X, y, seed: int, n_trees: int = DEFAULT_N_TREES) -> ForestModel:
    """Ensemble of totally randomized trees: no bootstrap, K=ceil(sqrt(d))
    candidate features per node with one uniform cut each, best Gini kept."""
    Xa, ya = _as_arrays(X, y)
    k = math.ceil(math.sqrt(Xa.shape[1]))
    rows = np.arange(Xa.shape[0])
    trees = [
        _grow_extra_tree(Xa, ya, rows, random.Random(seed * 1_000_003 + t), k)
        for t in range(n_trees)
    ]
    return ForestModel(trees=trees, dim=Xa.shape[1])


def fit_random_forest(X, y, seed: int, n_trees: int = DEFAULT_N_TREES) -> ForestModel:
    """Bootstrap-resampled trees with exhaustive midpoint search over
    K=ceil(sqrt(d)) random candidate features per node."""
    Xa, ya = _as_arrays(X, y)
    n = Xa.shape[0]
    k = math.ceil(math.sqrt(Xa.shape[1]))
    trees = []
    for t in range(n_trees):
        rng = random.Random(seed * 1_000_003 + t)
        sample = np.asarray([rng.randrange(n) for _ in range(n)])
        trees.append(_grow_rf_tree(Xa[sample], ya[sample], np.arange(n), rng, k))
    return ForestModel(trees=trees, dim=Xa.shape[1])


def fit_knn(X, y, seed: int = 0, k: int = DEFAULT_K_NEIGHBORS) -> KnnModel:
    Xa, ya = _as_arrays(X, y)
    return KnnModel(points=Xa, labels=ya, k=k)


def fit_decision_tree(X, y, seed: int = 0) -> TreeModel:
    Xa, ya = _as_arrays(X, y)

    def grow(rows: np.ndarray) -> dict:
        y_node = ya[rows]
        if rows.size < 2 or y_node.min() == y_node.max():
            return _leaf(y_node)
        sub = Xa[rows]
        parent = _gini(float(y_node.sum()), y_node.size)
        best = _best_exhaustive_split(sub, y_node, range(Xa.shape[1]))
        if best is None or parent - best[0] <= 1e-12:
            return _leaf(y_node)
        _, f, cut = best
        left_mask = sub[:, f] <= cut
        return {"feature": f, "cut": cut,
                "left": grow(rows[left_mask]), "right": grow(rows[~left_mask])}

    return TreeModel(root=grow(np.arange(Xa.shape[0])), dim=Xa.shape[1])


def fit_logreg(X, y, seed: int = 0, l2: float = DEFAULT_L2,
               epochs: int = DEFAULT_EPOCHS) -> LogRegModel:
    """Full-batch gradient descent on L2-regularized mean log-loss.

    The step size comes from a Lipschitz bound on the gradient, which makes the
    recorded loss history non-increasing on any dataset.
    """
    Xa, ya = _as_arrays(X, y)
    n, d = Xa.shape
    Xb = np.hstack([Xa, np.ones((n, 1))])  # bias column, unpenalized
    w = np.zeros(d + 1)
    mean_sq_norm = float((Xb * Xb).sum()) / n
    step = 1.0 / (mean_sq_norm / 4.0 + l2 + 1e-12)

    def loss(wv: np.ndarray) -> float:
        z = Xb @ wv
        # log(1 + exp(-m)) with m = z for y=1, -z for y=0, stably
        margins = np.where(ya == 1.0, z, -z)
        per = np.logaddexp(0.0, -margins)
        return float(per.mean() + 0.5 * l2 * float(wv[:d] @ wv[:d]))

    history = [loss(w)]
    for _ in range(epochs):
        z = Xb @ w
        probs = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
        grad = Xb.T @ (probs - ya) / n
        grad[:d] += l2 * w[:d]
        w = w - step * grad
        history.append(loss(w))
    model = LogRegModel(weights=w[:d].copy(), intercept=float(w[d]))
    model.loss_history = history
    return model


_FITTERS = {
    "extra-trees": fit_extra_trees,
    "random-forest": fit_random_forest,
    "knn": fit_knn,
    "logreg": fit_logreg,
    "decision-tree": fit_decision_tree,
}

_LOADERS = {
    "forest": ForestModel.from_dict,
    "tree": TreeModel.from_dict,
    "knn": KnnModel.from_dict,
    "logreg": LogRegModel.from_dict,
    "constant": ConstantModel.from_dict,
}


def fit_family(family: str, X, y, seed: int) -> Model:
    try:
        fitter = _FITTERS[family]
    except KeyError:
        raise FamilyError(f"unknown family {family!r}; known: {list(FAMILIES)}") from None
    return fitter(X, y, seed)


def model_from_dict(data: dict) -> Model:
    try:
        loader = _LOADERS[data["kind"]]
    except KeyError:
        raise FamilyError(f"unknown model kind {data.get('kind')!r}") from None
    return loader(data)

"""Binary text classifiers over sparse vectors: averaged perceptron, linear SVM
(stochastic subgradient, hinge loss) and a presence-split decision tree.

Training data are ``(vector, label)`` pairs with exactly two distinct labels.
"""

from __future__ import annotations

import json
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence, Union

from hatescope.errors import DatasetError, ParameterError, PersistenceError
from hatescope.features import DEFAULT_CONFIG, FeatureConfig, SparseVector

SCHEMA_VERSION = 1

LabeledVector = tuple  # (SparseVector, label)


def _binary_labels(data: Sequence[LabeledVector]) -> tuple[str, str]:
    labels = sorted({label for _, label in data})
    if len(labels) != 2:
        raise DatasetError(f"expected exactly 2 labels, found {len(labels)}: {labels[:5]}")
    return labels[0], labels[1]


def _dot(weights: dict, vector: SparseVector) -> float:
    return sum(weights[f] * v for f, v in vector.items() if f in weights)


@dataclass
class LinearModel:
    weights: dict[str, float]
    bias: float
    positive_label: str
    negative_label: str
    config: FeatureConfig = DEFAULT_CONFIG

    def __post_init__(self):
        if self.positive_label == self.negative_label:
            raise ParameterError("labels must be distinct")

    @property
    def labels(self) -> tuple[str, str]:
        return tuple(sorted((self.positive_label, self.negative_label)))

    def decision(self, vector: SparseVector) -> float:
        return _dot(self.weights, vector) + self.bias

    def predict(self, vector: SparseVector) -> tuple[str, float]:
        score = self.decision(vector)
        return (self.positive_label if score > 0 else self.negative_label), score

    def _parameters(self) -> dict:
        return {
            "weights": dict(sorted(self.weights.items())),
            "bias": self.bias,
            "positive_label": self.positive_label,
            "negative_label": self.negative_label,
        }


@dataclass
class PerceptronModel(LinearModel):
    kind = "perceptron"


@dataclass
class SvmModel(LinearModel):
    lam: float = 1e-4
    kind = "svm"

    def __post_init__(self):
        super().__post_init__()
        if not self.lam > 0:
            raise ParameterError("lambda must be positive")

    def _parameters(self) -> dict:
        p = super()._parameters()
        p["lambda"] = self.lam
        return p


def train_perceptron(
    data: Sequence[LabeledVector],
    epochs: int = 10,
    seed: int = 0,
    config: FeatureConfig = DEFAULT_CONFIG,
) -> PerceptronModel:
    """Averaged perceptron (Collins 2002) for two classes.

    Each epoch visits the examples in a seeded shuffle and adds ``y * x`` to
    the weights on every mistake (``y * score <= 0``). The returned weights
    and bias are averages over all steps, accumulated lazily.
    """
    if epochs < 1:
        raise ParameterError("epochs must be >= 1")
    pos, neg = _binary_labels(data)
    rng = random.Random(seed)
    w: dict[str, float] = defaultdict(float)
    totals: dict[str, float] = defaultdict(float)
    stamps: dict[str, int] = defaultdict(int)
    b = b_total = 0.0
    b_stamp = 0
    step = 0
    order = list(range(len(data)))
    for _ in range(epochs):
        rng.shuffle(order)
        for i in order:
            x, label = data[i]
            y = 1.0 if label == pos else -1.0
            if y * (_dot(w, x) + b) <= 0:
                for f, v in x.items():
                    totals[f] += (step - stamps[f]) * w[f]
                    stamps[f] = step
                    w[f] += y * v
                b_total += (step - b_stamp) * b
                b_stamp = step
                b += y
            step += 1
    avg = {}
    for f in sorted(w):
        total = totals[f] + (step - stamps[f]) * w[f]
        if total:
            avg[f] = total / step
    bias = (b_total + (step - b_stamp) * b) / step
    return PerceptronModel(avg, bias, pos, neg, config)


def train_svm(
    data: Sequence[LabeledVector],
    lam: float = 1e-4,
    epochs: int = 10,
    seed: int = 0,
    config: FeatureConfig = DEFAULT_CONFIG,
) -> SvmModel:
    """Linear SVM by stochastic subgradient descent (Pegasos-style).

    Minimizes ``lam/2 * |w|^2 + mean(max(0, 1 - y (w.x + b)))`` with step size
    ``1 / (lam * t)``. The bias is learned as the weight of a constant feature
    and is regularized along with ``w``.
    """
    if not lam > 0:
        raise ParameterError("lambda must be positive")
    if epochs < 1:
        raise ParameterError("epochs must be >= 1")
    pos, neg = _binary_labels(data)
    rng = random.Random(seed)
    # w = scale * v, so the shrink step is O(1)
    v: dict[str, float] = defaultdict(float)
    vb = 0.0
    scale = 1.0
    t = 0
    order = list(range(len(data)))
    for _ in range(epochs):
        rng.shuffle(order)
        for i in order:
            t += 1
            x, label = data[i]
            y = 1.0 if label == pos else -1.0
            eta = 1.0 / (lam * t)
            margin = y * (scale * (_dot(v, x) + vb))
            shrink = 1.0 - eta * lam
            if shrink <= 0.0:
                v.clear()
                vb = 0.0
                scale = 1.0
            else:
                scale *= shrink
            if margin < 1.0:
                step = eta * y / scale
                for f, val in x.items():
                    v[f] += step * val
                vb += step
            if scale < 1e-9:
                for f in v:
                    v[f] *= scale
                vb *= scale
                scale = 1.0
    weights = {f: scale * val for f, val in sorted(v.items()) if scale * val != 0.0}
    return SvmModel(weights, scale * vb, pos, neg, config, lam)


def svm_objective(model: LinearModel, data: Sequence[LabeledVector], lam: float | None = None) -> float:
    """Regularized hinge loss of a linear model on ``data``."""
    lam = getattr(model, "lam", None) if lam is None else lam
    reg = sum(w * w for w in model.weights.values()) + model.bias * model.bias
    hinge = 0.0
    for x, label in data:
        y = 1.0 if label == model.positive_label else -1.0
        hinge += max(0.0, 1.0 - y * model.decision(x))
    return lam / 2.0 * reg + hinge / len(data)


# -- decision tree ---------------------------------------------------------


@dataclass
class Leaf:
    label: str
    counts: dict[str, int]

    @property
    def size(self) -> int:
        return sum(self.counts.values())


@dataclass
class Split:
    feature: str
    absent: "TreeNode"
    present: "TreeNode"


TreeNode = Union[Leaf, Split]


def node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"label": node.label, "counts": dict(sorted(node.counts.items()))}
    return {"feature": node.feature, "absent": node_to_dict(node.absent), "present": node_to_dict(node.present)}


def node_from_dict(d: dict) -> TreeNode:
    if "feature" in d:
        return Split(d["feature"], node_from_dict(d["absent"]), node_from_dict(d["present"]))
    return Leaf(d["label"], {k: int(v) for k, v in d["counts"].items()})


@dataclass
class DecisionTreeModel:
    root: TreeNode
    min_leaf: int
    labels: tuple[str, ...]
    config: FeatureConfig = field(default_factory=lambda: FeatureConfig.words(1))
    kind = "tree"

    def leaf_for(self, vector: SparseVector) -> Leaf:
        node = self.root
        while isinstance(node, Split):
            node = node.present if vector.get(node.feature, 0) > 0 else node.absent
        return node

    def predict(self, vector: SparseVector) -> tuple[str, float]:
        leaf = self.leaf_for(vector)
        total = leaf.size
        return leaf.label, (leaf.counts.get(leaf.label, 0) / total if total else 0.0)

    def leaves(self) -> list[Leaf]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                out.append(node)
            else:
                stack.extend((node.present, node.absent))
        return out

    def depth(self) -> int:
        def walk(node):
            return 0 if isinstance(node, Leaf) else 1 + max(walk(node.absent), walk(node.present))

        return walk(self.root)

    def _parameters(self) -> dict:
        return {"min_leaf": self.min_leaf, "root": node_to_dict(self.root)}


def entropy(counts) -> float:
    total = sum(counts)
    if total == 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


def _majority(counts: Counter, labels: tuple[str, str]) -> str:
    # ties go to the lexicographically smaller label
    return min(labels, key=lambda lab: (-counts.get(lab, 0), lab))


def train_tree(
    data: Sequence[LabeledVector],
    min_leaf: int = 100,
    config: FeatureConfig | None = None,
) -> DecisionTreeModel:
    """Greedy binary tree over feature presence (weight > 0).

    A single-label dataset yields a one-leaf tree.

    Each split maximizes information gain; a node becomes a leaf when it is
    pure, when no split leaves at least ``min_leaf`` examples on both sides,
    or when the best gain is not positive. Gain ties go to the smaller
    feature-id.
    """
    if min_leaf < 1:
        raise ParameterError("min_leaf must be >= 1")
    if not data:
        raise DatasetError("empty dataset")
    labels = tuple(sorted({lab for _, lab in data}))
    if len(labels) > 2:
        raise DatasetError(f"expected at most 2 labels, found {len(labels)}")
    ys = [lab for _, lab in data]
    feats = [frozenset(f for f, v in x.items() if v > 0) for x, _ in data]

    def build(idx: list[int], used: frozenset) -> TreeNode:
        counts = Counter(ys[i] for i in idx)
        leaf = Leaf(_majority(counts, labels), {lab: counts.get(lab, 0) for lab in labels})
        n = len(idx)
        if len(counts) < 2 or n < 2 * min_leaf:
            return leaf
        # presence counts per feature and class
        present: dict[str, list[int]] = {}
        li = {lab: k for k, lab in enumerate(labels)}
        for i in idx:
            k = li[ys[i]]
            for f in feats[i]:
                if f in used:
                    continue
                slot = present.get(f)
                if slot is None:
                    slot = present[f] = [0, 0]
                slot[k] += 1
        c0, c1 = counts[labels[0]], counts[labels[1]]
        parent = entropy((c0, c1))
        best_f, best_gain = None, 0.0
        for f in sorted(present):
            p0, p1 = present[f]
            np_ = p0 + p1
            na = n - np_
            if np_ < min_leaf or na < min_leaf:
                continue
            gain = parent - (np_ / n) * entropy((p0, p1)) - (na / n) * entropy((c0 - p0, c1 - p1))
            if gain > best_gain + 1e-12:
                best_f, best_gain = f, gain
        if best_f is None:
            return leaf
        yes = [i for i in idx if best_f in feats[i]]
        no = [i for i in idx if best_f not in feats[i]]
        return Split(best_f, build(no, used | {best_f}), build(yes, used | {best_f}))

    root = build(list(range(len(data))), frozenset())
    return DecisionTreeModel(root, min_leaf, labels, config or FeatureConfig.words(1))


Model = Union[PerceptronModel, SvmModel, DecisionTreeModel]


def predict(model: Model, vector: SparseVector) -> tuple[str, float]:
    """Label and score for one vector; unknown features are ignored."""
    return model.predict(vector)


# -- evaluation ------------------------------------------------------------


@dataclass
class Metrics:
    labels: tuple[str, ...]
    confusion: dict[str, dict[str, int]]  # gold -> predicted -> count
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]

    @property
    def macro_precision(self) -> float:
        return sum(self.precision.values()) / len(self.labels)

    @property
    def macro_recall(self) -> float:
        return sum(self.recall.values()) / len(self.labels)

    @property
    def macro_f1(self) -> float:
        return sum(self.f1.values()) / len(self.labels)

    @property
    def accuracy(self) -> float:
        total = sum(sum(row.values()) for row in self.confusion.values())
        return sum(self.confusion[lab][lab] for lab in self.labels) / total

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "per_class": {
                lab: {"precision": self.precision[lab], "recall": self.recall[lab], "f1": self.f1[lab]}
                for lab in self.labels
            },
            "macro": {"precision": self.macro_precision, "recall": self.macro_recall, "f1": self.macro_f1},
            "accuracy": self.accuracy,
            "confusion": self.confusion,
        }

    def table(self, task: str = "") -> str:
        """Plain-text table with task, precision and recall columns."""
        rows = [("TASK", "CLASS", "PRECISION", "RECALL", "F1")]
        for lab in self.labels:
            rows.append((task, lab, f"{self.precision[lab]:.1%}", f"{self.recall[lab]:.1%}", f"{self.f1[lab]:.1%}"))
        rows.append((task, "macro", f"{self.macro_precision:.1%}", f"{self.macro_recall:.1%}", f"{self.macro_f1:.1%}"))
        widths = [max(len(r[i]) for r in rows) for i in range(5)]
        return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows) + "\n"


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def metrics_from_confusion(confusion: dict[str, dict[str, int]], labels: Sequence[str]) -> Metrics:
    labels = tuple(labels)
    precision, recall, f1 = {}, {}, {}
    for lab in labels:
        tp = confusion[lab][lab]
        fp = sum(confusion[g][lab] for g in labels if g != lab)
        fn = sum(confusion[lab][p] for p in labels if p != lab)
        precision[lab] = tp / (tp + fp) if tp + fp else 0.0
        recall[lab] = tp / (tp + fn) if tp + fn else 0.0
        f1[lab] = _f1(precision[lab], recall[lab])
    return Metrics(labels, confusion, precision, recall, f1)


def metrics(predicted: Sequence[str], gold: Sequence[str], labels: Sequence[str] | None = None) -> Metrics:
    """Per-class and macro-averaged precision, recall and (harmonic) F1."""
    if len(predicted) != len(gold):
        raise ParameterError(f"length mismatch: {len(predicted)} predicted vs {len(gold)} gold")
    if not gold:
        raise ParameterError("need at least one prediction")
    labels = tuple(sorted(set(labels or ()) | set(gold) | set(predicted)))
    confusion = {g: {p: 0 for p in labels} for g in labels}
    for p, g in zip(predicted, gold):
        confusion[g][p] += 1
    return metrics_from_confusion(confusion, labels)


def stratified_folds(data: Sequence[LabeledVector], k: int, seed: int = 0) -> list[list[int]]:
    """Indices per fold: seeded shuffle within each class, then round robin."""
    if k < 2:
        raise ParameterError("k must be >= 2")
    by_label: dict[str, list[int]] = defaultdict(list)
    for i, (_, label) in enumerate(data):
        by_label[label].append(i)
    rng = random.Random(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for label in sorted(by_label):
        idx = by_label[label]
        if len(idx) < k:
            raise DatasetError(f"class {label!r} has {len(idx)} examples, fewer than k={k}")
        rng.shuffle(idx)
        for j, i in enumerate(idx):
            folds[j % k].append(i)
    return [sorted(f) for f in folds]


def kfoldcv(
    trainer: Callable[..., Model],
    data: Sequence[LabeledVector],
    k: int = 10,
    seed: int = 0,
    **params,
) -> Metrics:
    """Stratified k-fold cross-validation with a pooled confusion matrix.

    ``trainer(train_data, **params)`` is called once per fold; e.g.
    ``kfoldcv(train_tree, data, k=3, min_leaf=100)``.
    """
    labels = _binary_labels(data)
    folds = stratified_folds(data, k, seed)
    confusion = {g: {p: 0 for p in labels} for g in labels}
    for held in folds:
        held_set = set(held)
        train = [data[i] for i in range(len(data)) if i not in held_set]
        model = trainer(train, **params)
        for i in held:
            x, gold = data[i]
            confusion[gold][model.predict(x)[0]] += 1
    return metrics_from_confusion(confusion, labels)


# -- persistence -----------------------------------------------------------


def model_to_dict(model: Model) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": model.kind,
        "labels": list(model.labels),
        "feature_config": model.config.to_dict(),
        "parameters": model._parameters(),
    }


def model_from_dict(d: dict) -> Model:
    if not isinstance(d, dict):
        raise PersistenceError("model file must hold a JSON object")
    if d.get("schema_version") != SCHEMA_VERSION:
        raise PersistenceError(f"unsupported schema_version {d.get('schema_version')!r}")
    try:
        kind = d["kind"]
        config = FeatureConfig.from_dict(d["feature_config"])
        p = d["parameters"]
        if kind == "tree":
            labels = tuple(d["labels"])
            return DecisionTreeModel(node_from_dict(p["root"]), int(p["min_leaf"]), labels, config)
        weights = {f: float(w) for f, w in p["weights"].items()}
        args = (weights, float(p["bias"]), p["positive_label"], p["negative_label"], config)
        if kind == "perceptron":
            return PerceptronModel(*args)
        if kind == "svm":
            return SvmModel(*args, float(p["lambda"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise PersistenceError(f"malformed model file: {exc}") from None
    raise PersistenceError(f"unknown model kind {kind!r}")


def dumps_model(model: Model) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True, ensure_ascii=False, indent=1) + "\n"


def save_model(model: Model, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def load_model(path) -> Model:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise PersistenceError(f"model file is not UTF-8: {exc}") from None
    try:
        d = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise PersistenceError(f"model file is not valid JSON: {exc.msg}") from None
    return model_from_dict(d)


TRAINERS = {"perceptron": train_perceptron, "svm": train_svm, "tree": train_tree}

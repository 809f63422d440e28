"""Stratified k-fold cross-validation and precision/recall/F tables.

Counts are pooled across folds before metrics are computed (micro
pooling) unless ``per_fold_mean`` is requested. The "Average" row is the
plain mean of the Favor and Against rows, F included.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import Dataset, StanceLabel, Target, Tweet
from .features import (
    FeatureConfig,
    PreparedTweet,
    build_vocabulary,
    vectorize,
)
from .rounding import format_percent
from .svm import LabeledExample, TrainConfig, predict, train

CLASSES = (StanceLabel.FAVOR, StanceLabel.AGAINST)
METRICS = ("precision", "recall", "f1")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with Favor as the positive class."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)

    def for_class(self, label: StanceLabel) -> tuple[int, int, int]:
        """(tp, fp, fn) treating ``label`` as the positive class."""
        if label is StanceLabel.FAVOR:
            return self.tp, self.fp, self.fn
        return self.tn, self.fn, self.fp

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[StanceLabel, StanceLabel]]) -> "ConfusionMatrix":
        """Build from ``(gold, predicted)`` pairs."""
        tp = fp = fn = tn = 0
        for gold, pred in pairs:
            if gold is StanceLabel.FAVOR:
                if pred is StanceLabel.FAVOR:
                    tp += 1
                else:
                    fn += 1
            elif pred is StanceLabel.FAVOR:
                fp += 1
            else:
                tn += 1
        return cls(tp, fp, fn, tn)


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def f_measure(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "ClassMetrics":
        p, r = _ratio(tp, tp + fp), _ratio(tp, tp + fn)
        return cls(p, r, f_measure(p, r))

    def get(self, metric: str) -> float:
        return getattr(self, metric)


def macro_average(rows: Sequence[ClassMetrics]) -> ClassMetrics:
    """Arithmetic mean of each metric; F is averaged directly, not recomputed."""
    n = len(rows)
    return ClassMetrics(
        sum(r.precision for r in rows) / n,
        sum(r.recall for r in rows) / n,
        sum(r.f1 for r in rows) / n,
    )


@dataclass(frozen=True)
class TargetReport:
    classes: dict[StanceLabel, ClassMetrics]
    matrix: ConfusionMatrix
    folds: int

    @property
    def average(self) -> ClassMetrics:
        return macro_average([self.classes[c] for c in CLASSES])

    def rows(self) -> list[tuple[str, ClassMetrics]]:
        return [("Favor", self.classes[StanceLabel.FAVOR]),
                ("Against", self.classes[StanceLabel.AGAINST]),
                ("Average", self.average)]


def aggregate(matrices: Sequence[ConfusionMatrix], per_fold_mean: bool = False) -> TargetReport:
    """Summarize fold confusion matrices for one target."""
    if not matrices:
        raise ValueError("aggregate needs at least one confusion matrix")
    pooled = sum(matrices, ConfusionMatrix())
    if per_fold_mean:
        classes = {
            c: macro_average([ClassMetrics.from_counts(*m.for_class(c)) for m in matrices]) for c in CLASSES
        }
    else:
        classes = {c: ClassMetrics.from_counts(*pooled.for_class(c)) for c in CLASSES}
    return TargetReport(classes, pooled, len(matrices))


@dataclass(frozen=True)
class RunReport:
    targets: dict[Target, TargetReport]
    folds: int
    config: dict[str, str] = field(default_factory=dict)

    def cells(self) -> dict[tuple[Target, str, str], float]:
        out = {}
        for target, rep in self.targets.items():
            for row, metrics in rep.rows():
                for metric in METRICS:
                    out[(target, row, metric)] = metrics.get(metric)
        return out


def compare_reports(a: RunReport, b: RunReport) -> dict[tuple[Target, str, str], float]:
    """Per-cell difference ``b - a`` in percentage points."""
    ca, cb = a.cells(), b.cells()
    if ca.keys() != cb.keys():
        raise ValueError("reports cover different targets or classes")
    return {key: 100.0 * (cb[key] - ca[key]) for key in ca}


# -- folds --------------------------------------------------------------------


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    assignment: dict[str, int]

    def fold_ids(self, fold: int) -> set[str]:
        return {tid for tid, f in self.assignment.items() if f == fold}

    def split(self, tweets: Sequence[Tweet], fold: int) -> tuple[list[Tweet], list[Tweet]]:
        train_, test = [], []
        for t in tweets:
            (test if self.assignment[t.id] == fold else train_).append(t)
        return train_, test


def make_folds(ds: Dataset | Sequence[Tweet], k: int = 10, seed: int = 0) -> FoldPlan:
    """Stratified fold assignment.

    Each class is shuffled with ``random.Random(seed)`` and dealt round-robin;
    the second class continues where the first stopped, so total fold sizes
    also differ by at most one.
    """
    tweets = ds.tweets if isinstance(ds, Dataset) else tuple(ds)
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = random.Random(seed)
    assignment = {}
    pos = 0
    for label in CLASSES:
        members = [t.id for t in tweets if t.label is label]
        if len(members) < k:
            raise ValueError(f"class {label.value} has {len(members)} tweets, fewer than k={k}")
        rng.shuffle(members)
        for tid in members:
            assignment[tid] = pos % k
            pos += 1
    return FoldPlan(k, seed, assignment)


# -- running ------------------------------------------------------------------


def labeled(prepared: Sequence[PreparedTweet], vocab) -> list[LabeledExample]:
    return [LabeledExample(vectorize(pt, vocab), pt.label.sign) for pt in prepared]


def evaluate_fold(
    train_set: Sequence[PreparedTweet],
    test_set: Sequence[PreparedTweet],
    cfg: FeatureConfig,
    tcfg: TrainConfig | None = None,
    vocab_source: Sequence[PreparedTweet] | None = None,
) -> ConfusionMatrix:
    """Build the vocabulary, train one model and count test predictions.

    The vocabulary comes from ``train_set`` unless ``vocab_source`` is given
    (the whole-set compatibility mode).
    """
    if not test_set:
        raise ValueError("empty test fold")
    if {pt.id for pt in train_set} & {pt.id for pt in test_set}:
        raise ValueError("train and test folds overlap")
    vocab = build_vocabulary(vocab_source if vocab_source is not None else train_set, cfg)
    model = train(labeled(train_set, vocab), tcfg, dimension=vocab.dimension)
    return ConfusionMatrix.from_pairs(
        (pt.label, predict(model, vectorize(pt, vocab))) for pt in test_set
    )


def cross_validate(
    prepared: Mapping[str, PreparedTweet],
    tweets: Sequence[Tweet],
    cfg: FeatureConfig,
    tcfg: TrainConfig | None = None,
    k: int = 10,
    seed: int = 0,
    whole_set_vocab: bool = False,
    per_fold_mean: bool = False,
) -> TargetReport:
    """k-fold cross-validation for one target's tweets."""
    plan = make_folds(tweets, k, seed)
    everything = [prepared[t.id] for t in tweets] if whole_set_vocab else None
    matrices = []
    for fold in range(k):
        tr, te = plan.split(tweets, fold)
        matrices.append(
            evaluate_fold([prepared[t.id] for t in tr], [prepared[t.id] for t in te], cfg, tcfg, everything)
        )
    return aggregate(matrices, per_fold_mean)


# -- rendering ----------------------------------------------------------------


def render_table(report: RunReport, rounding: str = "half-up") -> str:
    """Aligned text table: Target, Class, P (%), R (%), F (%)."""
    header = ("Target", "Class", "P (%)", "R (%)", "F (%)")
    rows = []
    for target, rep in report.targets.items():
        name = f"Target-{target.number}"
        for i, (cls, m) in enumerate(rep.rows()):
            rows.append((name if i == 0 else "", cls,
                         *(format_percent(m.get(x), 1, rounding) for x in METRICS)))
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]

    def line(cells):
        left = [c.ljust(w) for c, w in zip(cells[:2], widths[:2])]
        right = [c.rjust(w) for c, w in zip(cells[2:], widths[2:])]
        return "  ".join(left + right).rstrip()

    out = []
    for key, value in report.config.items():
        out.append(f"# {key}: {value}")
    out.append(f"# folds: {report.folds}")
    out.append(line(header))
    out.append("  ".join("-" * w for w in widths))
    out.extend(line(r) for r in rows)
    return "\n".join(out) + "\n"


def render_csv(report: RunReport, rounding: str = "half-up") -> str:
    """``target,class,precision,recall,f1`` with percentages to one decimal."""
    lines = ["target,class,precision,recall,f1"]
    for target, rep in report.targets.items():
        for cls, m in rep.rows():
            vals = ",".join(format_percent(m.get(x), 1, rounding) for x in METRICS)
            lines.append(f"TARGET{target.number},{cls},{vals}")
    return "\n".join(lines) + "\n"

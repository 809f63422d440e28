"""Stance-annotated tweet data sets and dual-annotator agreement."""

from __future__ import annotations

import csv
import enum
import io
import os
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

HEADER = ("id", "text", "target", "stance_a", "stance_b")

#: p_e under the uniform two-class chance model (two equally likely labels).
UNIFORM_CHANCE = 0.5


class DatasetError(ValueError):
    """Raised when a data set file or manifest is invalid."""


class StanceLabel(enum.Enum):
    FAVOR = "FAVOR"
    AGAINST = "AGAINST"

    @property
    def sign(self) -> int:
        return 1 if self is StanceLabel.FAVOR else -1

    @classmethod
    def from_sign(cls, y: float) -> "StanceLabel":
        return cls.FAVOR if y > 0 else cls.AGAINST


class Target(enum.Enum):
    TARGET1 = "TARGET1"
    TARGET2 = "TARGET2"

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]

    @property
    def number(self) -> int:
        return 1 if self is Target.TARGET1 else 2


_DISPLAY_NAMES = {Target.TARGET1: "Galatasaray", Target.TARGET2: "Fenerbahçe"}


@dataclass(frozen=True)
class Tweet:
    id: str
    text: str
    target: Target
    label_a: StanceLabel
    label_b: StanceLabel | None = None

    @property
    def label(self) -> StanceLabel:
        """The label used for training and evaluation (first annotator)."""
        return self.label_a

    @property
    def agreed(self) -> bool:
        return self.label_b is not None and self.label_a is self.label_b


@dataclass(frozen=True)
class Dataset:
    version_tag: str
    tweets: tuple[Tweet, ...]

    def __post_init__(self):
        seen = set()
        for tweet in self.tweets:
            if tweet.id in seen:
                raise DatasetError(f"duplicate tweet id {tweet.id!r}")
            seen.add(tweet.id)

    def __len__(self) -> int:
        return len(self.tweets)

    def __iter__(self):
        return iter(self.tweets)

    def by_target(self, target: Target) -> "Dataset":
        return Dataset(self.version_tag, tuple(t for t in self.tweets if t.target is target))

    def cell_counts(self) -> dict[tuple[Target, StanceLabel], int]:
        """Counts per (target, first-annotator label), every cell present."""
        counts = Counter((t.target, t.label_a) for t in self.tweets)
        return {(tg, lb): counts.get((tg, lb), 0) for tg in Target for lb in StanceLabel}


@dataclass(frozen=True)
class AgreementReport:
    n_total: int
    n_match: int
    p_o: float
    p_e: float
    kappa: float


def _parse_enum(enum_cls, token: str, what: str, row: int):
    try:
        return enum_cls(token.strip().upper())
    except ValueError:
        raise DatasetError(f"row {row}: unknown {what} {token!r}") from None


def parse_dataset(source: str, version_tag: str = "") -> Dataset:
    """Parse data set CSV text (header ``id,text,target,stance_a,stance_b``)."""
    reader = csv.reader(io.StringIO(source, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError("no records: file is empty") from None
    if tuple(h.strip() for h in header) != HEADER:
        raise DatasetError(f"bad header {header!r}, expected {','.join(HEADER)}")

    tweets = []
    ids = set()
    # rows are numbered from the first record, the header excluded
    for row_no, row in enumerate(reader, start=1):
        if not row:
            continue
        if len(row) != len(HEADER):
            raise DatasetError(f"row {row_no}: expected {len(HEADER)} fields, got {len(row)}")
        tid, text, target, stance_a, stance_b = row
        if not tid:
            raise DatasetError(f"row {row_no}: empty id")
        if tid in ids:
            raise DatasetError(f"row {row_no}: duplicate id {tid!r}")
        ids.add(tid)
        tweets.append(
            Tweet(
                id=tid,
                text=text,
                target=_parse_enum(Target, target, "target", row_no),
                label_a=_parse_enum(StanceLabel, stance_a, "stance", row_no),
                label_b=_parse_enum(StanceLabel, stance_b, "stance", row_no) if stance_b else None,
            )
        )
    if not tweets:
        raise DatasetError("no records: header only")
    return Dataset(version_tag, tuple(tweets))


def load_dataset(path, format: str = "csv", manifest=None) -> Dataset:
    """Load a data set file.

    If ``manifest`` is given, or a sidecar ``<path>.manifest`` exists, the
    per-cell counts are checked against it.
    """
    if format != "csv":
        raise DatasetError(f"unsupported data set format {format!r}")
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        ds = parse_dataset(fh.read(), version_tag=path.stem)
    if manifest is None:
        sidecar = Path(str(path) + ".manifest")
        if sidecar.exists():
            manifest = sidecar
    if manifest is not None:
        if isinstance(manifest, (str, os.PathLike)):
            manifest = load_manifest(manifest)
        validate_manifest(ds, manifest)
    return ds


def format_dataset(ds: Dataset) -> str:
    """Serialize to the canonical CSV form read by :func:`parse_dataset`."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for t in ds.tweets:
        writer.writerow(
            [t.id, t.text, t.target.value, t.label_a.value, t.label_b.value if t.label_b else ""]
        )
    return buf.getvalue()


def save_dataset(ds: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_dataset(ds))


def load_manifest(path) -> dict[str, int]:
    """Read a ``key=value`` manifest; ``#`` starts a comment line."""
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise DatasetError(f"manifest line {line_no}: expected key=value")
            try:
                entries[key.strip().upper()] = int(value)
            except ValueError:
                raise DatasetError(f"manifest line {line_no}: count {value.strip()!r} is not an integer") from None
    return entries


def validate_manifest(ds: Dataset, manifest: Mapping[str, int]) -> None:
    """Check declared counts. Keys: ``TOTAL`` and ``<TARGET>.<STANCE>``."""
    actual = {f"{tg.value}.{lb.value}": n for (tg, lb), n in ds.cell_counts().items()}
    actual["TOTAL"] = len(ds)
    for key, expected in manifest.items():
        key = key.upper()
        if key not in actual:
            raise DatasetError(f"manifest: unknown key {key!r}")
        if actual[key] != expected:
            raise DatasetError(f"manifest: {key} declares {expected}, data set has {actual[key]}")


def _scoped(ds: Dataset, scope: Target | None) -> list[Tweet]:
    tweets = [t for t in ds.tweets if scope is None or t.target is scope]
    missing = [t.id for t in tweets if t.label_b is None]
    if missing:
        raise DatasetError(f"{len(missing)} tweets lack a second annotation (first: {missing[0]!r})")
    if not tweets:
        raise DatasetError("no tweets in scope")
    return tweets


def match_counts(ds: Dataset, scope: Target | None = None) -> tuple[int, int]:
    """Return ``(n_match, n_total)`` for the dual-annotated tweets in scope."""
    tweets = _scoped(ds, scope)
    return sum(t.agreed for t in tweets), len(tweets)


def matching_percentage(ds: Dataset, scope: Target | None = None) -> float:
    """Fraction of tweets on which both annotators chose the same stance."""
    n_match, n_total = match_counts(ds, scope)
    return n_match / n_total


def cohens_kappa(p_o: float, p_e: float) -> float:
    """Chance-corrected agreement ``(p_o - p_e) / (1 - p_e)``."""
    if not 0.0 <= p_o <= 1.0:
        raise ValueError(f"p_o must lie in [0, 1], got {p_o}")
    if not 0.0 <= p_e <= 1.0:
        raise ValueError(f"p_e must lie in [0, 1], got {p_e}")
    if p_e == 1.0:
        raise ValueError("kappa is undefined when p_e = 1")
    return (p_o - p_e) / (1.0 - p_e)


def marginal_chance(ds: Dataset, scope: Target | None = None) -> float:
    """p_e estimated from the two annotators' label marginals."""
    tweets = _scoped(ds, scope)
    n = len(tweets)
    a = Counter(t.label_a for t in tweets)
    b = Counter(t.label_b for t in tweets)
    return sum(a[lb] * b[lb] for lb in StanceLabel) / (n * n)


def agreement_report(ds: Dataset, scope: Target | None = None, chance: str = "uniform") -> AgreementReport:
    """Agreement statistics.

    ``chance="uniform"`` fixes p_e at 0.5 (two equally likely labels);
    ``chance="marginal"`` gives the usual Cohen estimator.
    """
    n_match, n_total = match_counts(ds, scope)
    if chance == "uniform":
        p_e = UNIFORM_CHANCE
    elif chance == "marginal":
        p_e = marginal_chance(ds, scope)
    else:
        raise ValueError(f"unknown chance model {chance!r}")
    p_o = n_match / n_total
    return AgreementReport(n_total, n_match, p_o, p_e, cohens_kappa(p_o, p_e))


def consensus_subset(ds: Dataset) -> Dataset:
    """Keep the tweets both annotators labelled identically, in order."""
    _scoped(ds, None)
    return Dataset(ds.version_tag, tuple(t for t in ds.tweets if t.agreed))


def make_dataset(records: Iterable[Tweet], version_tag: str = "") -> Dataset:
    return Dataset(version_tag, tuple(records))

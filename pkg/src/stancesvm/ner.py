"""Gazetteer-based named entity recognition for tweets, and exact-match scoring.

Two tweet-specific relaxations are switchable: matching names regardless
of capitalization, and matching names written without Turkish diacritics
(``Fenerbahce`` for ``Fenerbahçe``). Inflectional suffixes are kept out of
the emitted span, whether they follow an apostrophe (``Galatasaray'ı``) or
are glued to the name (``Galatasarayı``).
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, NamedTuple

from .corpus import Dataset, StanceLabel, Target
from .text import Token, TokenKind, fold_case, tokenize


class AnnotationError(ValueError):
    """Raised for invalid gazetteer or annotation files and invalid spans."""


class EntityType(enum.Enum):
    PERSON = "PER"
    LOCATION = "LOC"
    ORGANIZATION = "ORG"


class EntitySpan(NamedTuple):
    start: int
    end: int
    etype: EntityType
    surface: str

    @property
    def key(self) -> tuple[int, int, EntityType]:
        return self.start, self.end, self.etype

    @classmethod
    def from_text(cls, text: str, start: int, end: int, etype: EntityType) -> "EntitySpan":
        if not 0 <= start < end <= len(text):
            raise AnnotationError(f"span [{start}, {end}) out of bounds for text of length {len(text)}")
        return cls(start, end, etype, text[start:end])


_DIACRITICS = str.maketrans("çğıöşüÇĞİÖŞÜ", "cgiosuCGIOSU")


def diacritics_fold(text: str) -> str:
    """Case-fold, then map ç ğ ı ö ş ü to their ASCII base letters."""
    return fold_case(text).translate(_DIACRITICS)


def _folder(fold_diacritics: bool):
    return diacritics_fold if fold_diacritics else fold_case


@dataclass(frozen=True)
class NerOptions:
    relax_capitalization: bool = True
    fold_diacritics: bool = True
    # strip suffixes attached without an apostrophe ("Galatasarayı")
    match_unmarked_suffixes: bool = True


class Gazetteer:
    """Typed name list compiled into case-folded and diacritics-folded indexes.

    When two entries collide on a key, the one listed first wins.
    """

    def __init__(self, entries: Iterable[tuple[str, EntityType]]):
        self.entries = []
        self._index = {False: {}, True: {}}
        self.max_tokens = 0
        for name, etype in entries:
            words = tuple(name.split())
            if not words:
                raise AnnotationError("empty gazetteer name")
            self.entries.append((" ".join(words), etype))
            self.max_tokens = max(self.max_tokens, len(words))
            for diacritics in (False, True):
                fold = _folder(diacritics)
                self._index[diacritics].setdefault(tuple(fold(w) for w in words), etype)

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, words: tuple[str, ...], fold_diacritics: bool = True) -> EntityType | None:
        """Type of the entry whose folded token sequence equals ``words``."""
        fold = _folder(fold_diacritics)
        return self._index[fold_diacritics].get(tuple(fold(w) for w in words))

    def _lookup_folded(self, key: tuple[str, ...], fold_diacritics: bool) -> EntityType | None:
        return self._index[fold_diacritics].get(key)


def parse_gazetteer(source: str) -> Gazetteer:
    entries = []
    for line_no, line in enumerate(source.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        tag, sep, name = line.partition("\t")
        if not sep or not name.strip():
            raise AnnotationError(f"gazetteer line {line_no}: expected TYPE<TAB>name")
        try:
            etype = EntityType(tag.strip())
        except ValueError:
            raise AnnotationError(f"gazetteer line {line_no}: unknown type {tag!r}") from None
        entries.append((name.strip(), etype))
    return Gazetteer(entries)


def load_gazetteer(path) -> Gazetteer:
    with open(path, encoding="utf-8") as fh:
        return parse_gazetteer(fh.read())


@lru_cache(maxsize=None)
def demo_gazetteer() -> Gazetteer:
    """The small synthetic gazetteer shipped with the package."""
    source = resources.files("stancesvm").joinpath("data", "gazetteer_demo.tsv").read_text(encoding="utf-8")
    return parse_gazetteer(source)


# -- recognition --------------------------------------------------------------


def _stem_length(token: Token) -> int:
    for i, ch in enumerate(token.surface):
        if ch in "'’":
            return i
    return len(token.surface)


def _candidates(tokens: list[Token], gaz: Gazetteer, opts: NerOptions):
    fold = _folder(opts.fold_diacritics)
    n = len(tokens)
    for i in range(n):
        inner: list[str] = []
        for j in range(i, min(n, i + gaz.max_tokens)):
            tok = tokens[j]
            if tok.kind is not TokenKind.WORD:
                break
            if not opts.relax_capitalization and not tok.surface[0].isupper():
                break
            stem = _stem_length(tok)
            if opts.match_unmarked_suffixes:
                lengths = range(stem, 0, -1)
            else:
                lengths = (stem,)
            for k in lengths:
                etype = gaz._lookup_folded(tuple(inner) + (fold(tok.surface[:k]),), opts.fold_diacritics)
                if etype is not None:
                    yield tok.start + k - tokens[i].start, tokens[i].start, tok.start + k, etype
                    break  # longest stem only
            if stem != len(tok.surface):
                break  # an apostrophe ends the name
            inner.append(fold(tok.surface))


def recognize(text: str, gaz: Gazetteer, options: NerOptions | None = None) -> list[EntitySpan]:
    """Find gazetteer names in ``text``.

    Overlapping candidates are resolved in favour of the longer span, then
    the earlier start. Returned spans are sorted and non-overlapping.
    """
    opts = options or NerOptions()
    if not len(gaz) or not text:
        return []
    tokens = tokenize(text)
    cands = sorted(_candidates(tokens, gaz, opts), key=lambda c: (-c[0], c[1]))
    taken: list[tuple[int, int]] = []
    spans = []
    for _, start, end, etype in cands:
        if any(start < e and s < end for s, e in taken):
            continue
        taken.append((start, end))
        spans.append(EntitySpan(start, end, etype, text[start:end]))
    return sorted(spans)


def recognize_dataset(ds: Dataset, gaz: Gazetteer, options: NerOptions | None = None) -> dict[str, list[EntitySpan]]:
    return {t.id: recognize(t.text, gaz, options) for t in ds.tweets}


# -- scoring ------------------------------------------------------------------


@dataclass(frozen=True)
class NerScore:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "NerScore") -> "NerScore":
        return NerScore(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


def check_no_overlap(spans: Iterable[EntitySpan]) -> None:
    ordered = sorted(spans)
    for a, b in zip(ordered, ordered[1:]):
        if b.start < a.end:
            raise AnnotationError(f"overlapping spans [{a.start}, {a.end}) and [{b.start}, {b.end})")


def score_exact(gold: list[EntitySpan], predicted: list[EntitySpan]) -> NerScore:
    """Exact-match counts for one tweet: boundaries and type must both agree."""
    check_no_overlap(gold)
    check_no_overlap(predicted)
    gold_keys = {s.key for s in gold}
    pred_keys = {s.key for s in predicted}
    tp = len(gold_keys & pred_keys)
    return NerScore(tp=tp, fp=len(pred_keys) - tp, fn=len(gold_keys) - tp)


def score_corpus(
    gold: Mapping[str, list[EntitySpan]], predicted: Mapping[str, list[EntitySpan]], ids: Iterable[str]
) -> NerScore:
    """Micro-summed exact-match counts over the given tweet ids."""
    total = NerScore(0, 0, 0)
    for tid in ids:
        total += score_exact(gold.get(tid, []), predicted.get(tid, []))
    return total


def score_by_cell(
    ds: Dataset, gold: Mapping[str, list[EntitySpan]], predicted: Mapping[str, list[EntitySpan]]
) -> tuple[dict[tuple[Target, StanceLabel], NerScore], NerScore]:
    """Scores per (target, stance) cell, plus the micro-averaged overall score."""
    cells = {}
    for target in Target:
        for label in StanceLabel:
            ids = [t.id for t in ds.tweets if t.target is target and t.label is label]
            cells[(target, label)] = score_corpus(gold, predicted, ids)
    overall = NerScore(0, 0, 0)
    for score in cells.values():
        overall += score
    return cells, overall


@dataclass(frozen=True)
class NeStatistics:
    tweets: dict[tuple[Target, StanceLabel], int]
    counts: dict[tuple[Target, StanceLabel], dict[EntityType, int]]

    def cell_total(self, cell: tuple[Target, StanceLabel]) -> int:
        return sum(self.counts[cell].values())

    def type_total(self, etype: EntityType) -> int:
        return sum(c[etype] for c in self.counts.values())

    @property
    def total_tweets(self) -> int:
        return sum(self.tweets.values())

    @property
    def total(self) -> int:
        return sum(self.type_total(et) for et in EntityType)


def ne_statistics(ds: Dataset, gold: Mapping[str, list[EntitySpan]]) -> NeStatistics:
    """Count annotated entities per (target, stance, type)."""
    tweets: dict[tuple[Target, StanceLabel], int] = {(tg, lb): 0 for tg in Target for lb in StanceLabel}
    counts = {cell: {et: 0 for et in EntityType} for cell in tweets}
    for t in ds.tweets:
        cell = (t.target, t.label)
        tweets[cell] += 1
        for etype, n in Counter(s.etype for s in gold.get(t.id, [])).items():
            counts[cell][etype] += n
    return NeStatistics(tweets, counts)


# -- annotation files ---------------------------------------------------------


def parse_annotations(source: str, ds: Dataset) -> dict[str, list[EntitySpan]]:
    """Parse ``tweet_id<TAB>start<TAB>end<TAB>TYPE`` lines against ``ds``."""
    texts = {t.id: t.text for t in ds.tweets}
    spans: dict[str, list[EntitySpan]] = {}
    for line_no, line in enumerate(source.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise AnnotationError(f"annotation line {line_no}: expected 4 tab-separated fields")
        tid, start, end, tag = fields
        if tid not in texts:
            raise AnnotationError(f"annotation line {line_no}: unknown tweet id {tid!r}")
        try:
            etype = EntityType(tag.strip())
            span = EntitySpan.from_text(texts[tid], int(start), int(end), etype)
        except ValueError as exc:
            raise AnnotationError(f"annotation line {line_no}: {exc}") from None
        spans.setdefault(tid, []).append(span)
    for tid, lst in spans.items():
        lst.sort()
        try:
            check_no_overlap(lst)
        except AnnotationError as exc:
            raise AnnotationError(f"tweet {tid!r}: {exc}") from None
    return spans


def load_annotations(path, ds: Dataset) -> dict[str, list[EntitySpan]]:
    with open(path, encoding="utf-8") as fh:
        return parse_annotations(fh.read(), ds)


def format_annotations(spans: Mapping[str, list[EntitySpan]], ds: Dataset) -> str:
    lines = []
    for t in ds.tweets:
        for s in spans.get(t.id, []):
            lines.append(f"{t.id}\t{s.start}\t{s.end}\t{s.etype.value}\n")
    return "".join(lines)

"""Binary bag-of-words feature vectors.

A vector is laid out as ``[unigrams | bigrams | named entities | flags]``.
Each textual family is indexed in lexicographic term order; the boolean
flags (hashtag, link, positive/negative emoticon) take fixed slots after
the last textual index.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import StanceLabel, Tweet
from .ner import AnnotationError, EntitySpan
from .text import (
    EmoticonLexicon,
    Flags,
    StopwordList,
    TokenKind,
    detect_flags,
    fold_case,
    remove_stopwords,
    tokenize,
)

TEXT_FAMILIES = ("unigram", "bigram", "ne")
FLAG_FAMILIES = ("hashtag", "link", "emo-pos", "emo-neg")
ALL_FAMILIES = TEXT_FAMILIES + FLAG_FAMILIES

_FLAG_FIELD = {
    "hashtag": "has_hashtag",
    "link": "has_link",
    "emo-pos": "has_pos_emoticon",
    "emo-neg": "has_neg_emoticon",
}

# token kinds that contribute n-gram terms; urls and emoticons only feed flags
_TERM_KINDS = (TokenKind.WORD, TokenKind.HASHTAG)


class NeSource(enum.Enum):
    GOLD = "gold"
    AUTO = "auto"


@dataclass(frozen=True)
class FeatureConfig:
    use_unigrams: bool = True
    use_bigrams: bool = False
    use_hashtag_flag: bool = False
    use_link_flag: bool = False
    use_pos_emoticon_flag: bool = False
    use_neg_emoticon_flag: bool = False
    use_named_entities: bool = False
    ne_source: NeSource = NeSource.GOLD
    min_term_freq: int = 1
    case_fold: bool = True

    def __post_init__(self):
        if not self.families:
            raise ValueError("at least one feature family must be enabled")
        if self.min_term_freq < 1:
            raise ValueError("min_term_freq must be at least 1")

    @property
    def families(self) -> tuple[str, ...]:
        on = {
            "unigram": self.use_unigrams,
            "bigram": self.use_bigrams,
            "ne": self.use_named_entities,
            "hashtag": self.use_hashtag_flag,
            "link": self.use_link_flag,
            "emo-pos": self.use_pos_emoticon_flag,
            "emo-neg": self.use_neg_emoticon_flag,
        }
        return tuple(f for f in ALL_FAMILIES if on[f])

    @property
    def text_families(self) -> tuple[str, ...]:
        return tuple(f for f in self.families if f in TEXT_FAMILIES)

    @property
    def flag_families(self) -> tuple[str, ...]:
        return tuple(f for f in self.families if f in FLAG_FAMILIES)

    @classmethod
    def from_families(cls, families: Iterable[str] | str, **kwargs) -> "FeatureConfig":
        """Build from names such as ``"unigram,hashtag,ne"``."""
        if isinstance(families, str):
            families = [f.strip() for f in families.split(",") if f.strip()]
        families = set(families)
        unknown = families - set(ALL_FAMILIES)
        if unknown:
            raise ValueError(f"unknown feature families: {', '.join(sorted(unknown))}")
        return cls(
            use_unigrams="unigram" in families,
            use_bigrams="bigram" in families,
            use_hashtag_flag="hashtag" in families,
            use_link_flag="link" in families,
            use_pos_emoticon_flag="emo-pos" in families,
            use_neg_emoticon_flag="emo-neg" in families,
            use_named_entities="ne" in families,
            **kwargs,
        )


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, value) pairs."""

    indices: tuple[int, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values differ in length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if self.indices and self.indices[0] < 0:
            raise ValueError("negative feature index")

    @classmethod
    def from_dict(cls, entries: dict[int, float]) -> "SparseVector":
        items = sorted((i, v) for i, v in entries.items() if v != 0)
        return cls(tuple(i for i, _ in items), tuple(float(v) for _, v in items))

    @classmethod
    def binary(cls, indices: Iterable[int]) -> "SparseVector":
        idx = tuple(sorted(set(indices)))
        return cls(idx, (1.0,) * len(idx))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(zip(self.indices, self.values))

    @property
    def max_index(self) -> int:
        return self.indices[-1] if self.indices else -1

    def dot(self, dense) -> float:
        n = len(dense)
        return float(sum(v * dense[i] for i, v in zip(self.indices, self.values) if i < n))


@dataclass(frozen=True)
class PreparedTweet:
    """A tweet after tokenization, stopword removal and flag detection."""

    id: str
    label: StanceLabel
    terms: tuple[str, ...]
    flags: Flags
    entities: tuple[str, ...] = ()

    def unigrams(self) -> tuple[str, ...]:
        return self.terms

    def bigrams(self) -> list[str]:
        return [f"{a}_{b}" for a, b in zip(self.terms, self.terms[1:])]

    def family_terms(self, family: str) -> Sequence[str]:
        if family == "unigram":
            return self.terms
        if family == "bigram":
            return self.bigrams()
        if family == "ne":
            return self.entities
        raise ValueError(f"not a textual family: {family!r}")


def ne_terms(tweet: Tweet, spans: Iterable[EntitySpan]) -> list[str]:
    """Folded entity surfaces, duplicates collapsed, in order of appearance."""
    out = []
    for span in spans:
        if not 0 <= span.start < span.end <= len(tweet.text):
            raise AnnotationError(f"tweet {tweet.id!r}: span [{span.start}, {span.end}) out of bounds")
        term = " ".join(fold_case(tweet.text[span.start:span.end]).split())
        if term not in out:
            out.append(term)
    return out


def prepare(
    tweet: Tweet,
    stops: StopwordList | None = None,
    lexicon: EmoticonLexicon | None = None,
    case_fold: bool = True,
    entities: Iterable[EntitySpan] = (),
) -> PreparedTweet:
    if not tweet.text.strip():
        raise ValueError(f"tweet {tweet.id!r} has no text")
    tokens = tokenize(tweet.text, lexicon)
    if stops is not None:
        tokens = remove_stopwords(tokens, stops)
    terms = tuple((t.folded if case_fold else t.surface) for t in tokens if t.kind in _TERM_KINDS)
    return PreparedTweet(
        id=tweet.id,
        label=tweet.label,
        terms=terms,
        flags=detect_flags(tokens, lexicon),
        entities=tuple(ne_terms(tweet, entities)),
    )


@dataclass(frozen=True)
class Vocabulary:
    terms: dict[str, dict[str, int]]
    flags: tuple[str, ...] = ()
    size: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "size", sum(len(t) for t in self.terms.values()))

    @property
    def dimension(self) -> int:
        return self.size + len(self.flags)

    def flag_index(self, flag: str) -> int:
        return self.size + self.flags.index(flag)

    def index(self, family: str, term: str) -> int | None:
        return self.terms.get(family, {}).get(term)

    def dump(self) -> str:
        """``family<TAB>term<TAB>index`` lines; flags use an empty term.

        A leading ``#families`` line keeps families that ended up empty.
        """
        lines = [f"#families\t{','.join(self.terms)}\n"]
        for family, table in self.terms.items():
            for term, idx in table.items():
                lines.append(f"{family}\t{term}\t{idx}\n")
        for flag in self.flags:
            lines.append(f"{flag}\t\t{self.flag_index(flag)}\n")
        return "".join(lines)

    @classmethod
    def parse(cls, source: str) -> "Vocabulary":
        terms: dict[str, dict[str, int]] = {}
        flags = []
        for line_no, line in enumerate(source.splitlines(), start=1):
            if line.startswith("#families\t"):
                for family in filter(None, line.split("\t", 1)[1].split(",")):
                    terms.setdefault(family, {})
                continue
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"vocabulary line {line_no}: expected family<TAB>term<TAB>index")
            family, term, idx = parts
            if family in FLAG_FAMILIES:
                flags.append((int(idx), family))
            elif family in TEXT_FAMILIES:
                terms.setdefault(family, {})[term] = int(idx)
            else:
                raise ValueError(f"vocabulary line {line_no}: unknown family {family!r}")
        vocab = cls(terms, tuple(f for _, f in sorted(flags)))
        expected = list(range(vocab.dimension))
        found = sorted([i for t in terms.values() for i in t.values()] + [i for i, _ in flags])
        if found != expected:
            raise ValueError("vocabulary indices are not dense and 0-based")
        return vocab


def build_vocabulary(train: Sequence[PreparedTweet], cfg: FeatureConfig) -> Vocabulary:
    """Index every textual term seen at least ``cfg.min_term_freq`` times."""
    if not train:
        raise ValueError("cannot build a vocabulary from an empty training set")
    terms = {}
    offset = 0
    for family in cfg.text_families:
        freq = Counter(term for pt in train for term in pt.family_terms(family))
        kept = sorted(term for term, n in freq.items() if n >= cfg.min_term_freq)
        terms[family] = {term: offset + i for i, term in enumerate(kept)}
        offset += len(kept)
    return Vocabulary(terms, cfg.flag_families)


def vectorize(pt: PreparedTweet, vocab: Vocabulary, cfg: FeatureConfig | None = None) -> SparseVector:
    """Binary presence vector; out-of-vocabulary terms are ignored.

    The families come from ``vocab``; ``cfg`` is accepted for symmetry with
    :func:`build_vocabulary` and must agree with it when given.
    """
    if cfg is not None and (cfg.text_families != tuple(vocab.terms) or cfg.flag_families != vocab.flags):
        raise ValueError("feature configuration does not match the vocabulary")
    hits = set()
    for family, table in vocab.terms.items():
        for term in pt.family_terms(family):
            idx = table.get(term)
            if idx is not None:
                hits.add(idx)
    for flag in vocab.flags:
        if getattr(pt.flags, _FLAG_FIELD[flag]):
            hits.add(vocab.flag_index(flag))
    return SparseVector.binary(hits)


def prepare_all(
    tweets: Iterable[Tweet],
    stops: StopwordList | None = None,
    lexicon: EmoticonLexicon | None = None,
    case_fold: bool = True,
    entities: Mapping[str, Sequence[EntitySpan]] | None = None,
) -> dict[str, PreparedTweet]:
    """Prepare many tweets, keyed by id."""
    entities = entities or {}
    return {
        t.id: prepare(t, stops, lexicon, case_fold, entities.get(t.id, ()))
        for t in tweets
    }

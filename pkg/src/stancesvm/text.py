"""Tweet tokenization with Turkish-aware case folding.

Tokens are recognized by one regular expression whose alternatives are
tried in precedence order: URL, emoticon, hashtag, mention, word,
punctuation. Whitespace is skipped; every other character ends up in
exactly one token.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, NamedTuple


class TokenKind(enum.Enum):
    WORD = "Word"
    HASHTAG = "Hashtag"
    MENTION = "Mention"
    URL = "Url"
    EMOTICON = "Emoticon"
    PUNCT = "Punct"


class Token(NamedTuple):
    surface: str
    folded: str
    kind: TokenKind
    start: int
    end: int

    @property
    def span(self) -> tuple[int, int]:
        return self.start, self.end


@dataclass(frozen=True)
class EmoticonLexicon:
    positive: frozenset[str]
    negative: frozenset[str]

    def __post_init__(self):
        overlap = self.positive & self.negative
        if overlap:
            raise ValueError(f"emoticons listed as both positive and negative: {sorted(overlap)}")

    @property
    def all(self) -> frozenset[str]:
        return self.positive | self.negative


@dataclass(frozen=True)
class StopwordList:
    entries: frozenset[str]

    def __post_init__(self):
        unfolded = [w for w in self.entries if fold_case(w) != w]
        if unfolded:
            raise ValueError(f"stopwords must be case-folded: {sorted(unfolded)[:5]}")

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "StopwordList":
        return cls(frozenset(fold_case(w) for w in words))


_TURKISH_UPPER = str.maketrans({"I": "ı", "İ": "i"})


def fold_case(surface: str) -> str:
    """Lowercase with Turkish dotted/dotless i: 'I' -> 'ı', 'İ' -> 'i'."""
    return surface.translate(_TURKISH_UPPER).lower()


_WORD = r"\w+(?:['’]\w+)*"


@lru_cache(maxsize=32)
def _token_regex(emoticons: frozenset[str]) -> re.Pattern:
    emo_alts = []
    # longest first so ":-)" wins over ":-"
    for emo in sorted(emoticons, key=lambda e: (-len(e), e)):
        alt = re.escape(emo)
        # an emoticon bounded by a word character must not be glued to a word
        if re.match(r"\w", emo[0]):
            alt = r"(?<!\w)" + alt
        if re.match(r"\w", emo[-1]):
            alt = alt + r"(?!\w)"
        emo_alts.append(alt)
    parts = [
        (TokenKind.URL, r"(?:[Hh][Tt][Tt][Pp][Ss]?://|[Ww][Ww][Ww]\.)\S+"),
        (TokenKind.EMOTICON, "|".join(emo_alts) if emo_alts else r"(?!)"),
        (TokenKind.HASHTAG, r"\#\w+"),
        (TokenKind.MENTION, r"@\w+"),
        (TokenKind.WORD, _WORD),
        (TokenKind.PUNCT, r"[^\w\s]"),
    ]
    return re.compile("|".join(f"(?P<{kind.name}>{rx})" for kind, rx in parts))


def tokenize(text: str, lexicon: EmoticonLexicon | None = None) -> list[Token]:
    """Split ``text`` into tokens with character spans.

    >>> [t.surface for t in tokenize("Bu grup haşlar Galatasarayı :D")]
    ['Bu', 'grup', 'haşlar', 'Galatasarayı', ':D']
    """
    if lexicon is None:
        lexicon = default_emoticons()
    regex = _token_regex(lexicon.all)
    return [
        Token(m.group(), fold_case(m.group()), TokenKind[m.lastgroup], m.start(), m.end())
        for m in regex.finditer(text)
    ]


def remove_stopwords(tokens: list[Token], stops: StopwordList) -> list[Token]:
    """Drop word tokens whose folded form is a stopword."""
    return [t for t in tokens if not (t.kind is TokenKind.WORD and t.folded in stops)]


class Flags(NamedTuple):
    has_hashtag: bool
    has_link: bool
    has_pos_emoticon: bool
    has_neg_emoticon: bool


def detect_flags(tokens: Iterable[Token], lexicon: EmoticonLexicon | None = None) -> Flags:
    if lexicon is None:
        lexicon = default_emoticons()
    kinds = set()
    emoticons = set()
    for t in tokens:
        kinds.add(t.kind)
        if t.kind is TokenKind.EMOTICON:
            emoticons.add(t.surface)
    return Flags(
        has_hashtag=TokenKind.HASHTAG in kinds,
        has_link=TokenKind.URL in kinds,
        has_pos_emoticon=bool(emoticons & lexicon.positive),
        has_neg_emoticon=bool(emoticons & lexicon.negative),
    )


# -- resource files ---------------------------------------------------------


def parse_stopwords(source: str) -> StopwordList:
    words = []
    for line in source.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line)
    return StopwordList.from_words(words)


def parse_emoticons(source: str) -> EmoticonLexicon:
    """Parse ``POS<TAB>token`` / ``NEG<TAB>token`` lines."""
    pos, neg = set(), set()
    for line_no, line in enumerate(source.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        polarity, sep, token = line.rstrip("\r\n").partition("\t")
        token = token.strip()
        if not sep or not token:
            raise ValueError(f"emoticon line {line_no}: expected POS<TAB>token or NEG<TAB>token")
        if polarity == "POS":
            pos.add(token)
        elif polarity == "NEG":
            neg.add(token)
        else:
            raise ValueError(f"emoticon line {line_no}: unknown polarity {polarity!r}")
    return EmoticonLexicon(frozenset(pos), frozenset(neg))


def load_stopwords(path) -> StopwordList:
    with open(path, encoding="utf-8") as fh:
        return parse_stopwords(fh.read())


def load_emoticons(path) -> EmoticonLexicon:
    with open(path, encoding="utf-8") as fh:
        return parse_emoticons(fh.read())


def _data_text(name: str) -> str:
    return resources.files("stancesvm").joinpath("data", name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def default_stopwords() -> StopwordList:
    return parse_stopwords(_data_text("stopwords_tr.txt"))


@lru_cache(maxsize=None)
def default_emoticons() -> EmoticonLexicon:
    return parse_emoticons(_data_text("emoticons.tsv"))

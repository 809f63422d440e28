import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stancesvm.text import (
    EmoticonLexicon,
    StopwordList,
    TokenKind,
    default_emoticons,
    default_stopwords,
    detect_flags,
    fold_case,
    parse_emoticons,
    parse_stopwords,
    remove_stopwords,
    tokenize,
)

K = TokenKind
LEX = default_emoticons()

# tweet-like alphabet: Turkish letters, digits, emoticon and URL characters
tweet_text = st.lists(
    st.sampled_from(list("aIİıçğöşüGFD3 #@:;()<>/\\.-_'?!w") + ["http://", "www.", ":D", ":)", "<3", "\n"]),
    max_size=30,
).map("".join)
any_text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=40)


class TestTokenize:
    def test_sample_tweet_hashtag(self):
        toks = tokenize("Kanser olmaya hazır mıyız ? #Fenerinmaçıvar")
        assert [(t.kind, t.surface) for t in toks[-2:]] == [(K.PUNCT, "?"), (K.HASHTAG, "#Fenerinmaçıvar")]

    def test_empty(self):
        assert tokenize("") == []

    def test_sample_tweet_emoticon(self):
        toks = tokenize("Bu grup haşlar Galatasarayı :D")
        assert (toks[-1].kind, toks[-1].surface) == (K.EMOTICON, ":D")
        assert [t.surface for t in toks[:-1]] == ["Bu", "grup", "haşlar", "Galatasarayı"]

    def test_kinds(self):
        toks = tokenize("@ali http://t.co/x1 www.gs.org.tr <3 :( Galatasaray'ı yendik!")
        assert [t.kind for t in toks] == [K.MENTION, K.URL, K.URL, K.EMOTICON, K.EMOTICON, K.WORD, K.WORD, K.PUNCT]
        assert toks[5].surface == "Galatasaray'ı"

    def test_url_beats_emoticon(self):
        assert [t.kind for t in tokenize("https://x.com/:D")] == [K.URL]

    def test_emoticon_not_glued_to_word(self):
        assert [t.surface for t in tokenize(":Den")] == [":", "Den"]

    def test_spans(self):
        text = "ve  biz :)"
        toks = tokenize(text)
        assert [(t.start, t.end) for t in toks] == [(0, 2), (4, 7), (8, 10)]
        assert all(text[t.start:t.end] == t.surface for t in toks)

    def test_folded(self):
        assert tokenize("IŞIK İzmir")[0].folded == "ışık"


@settings(max_examples=200)
@given(st.one_of(tweet_text, any_text))
def test_surfaces_and_whitespace_reconstruct_input(text):
    toks = tokenize(text)
    pos = 0
    rebuilt = []
    for t in toks:
        gap = text[pos:t.start]
        assert gap.strip() == "" and not re.search(r"\S", gap)
        rebuilt.append(gap + t.surface)
        assert t.start >= pos and t.end > t.start
        pos = t.end
    assert text[pos:].strip() == ""
    assert "".join(rebuilt) + text[pos:] == text


@settings(max_examples=200)
@given(st.one_of(tweet_text, any_text))
def test_retokenizing_joined_surfaces_keeps_kinds(text):
    toks = tokenize(text)
    again = tokenize(" ".join(t.surface for t in toks))
    assert [t.kind for t in again] == [t.kind for t in toks]
    assert [t.surface for t in again] == [t.surface for t in toks]


class TestFoldCase:
    @pytest.mark.parametrize("surface, folded", [
        ("Iyı", "ıyı"),
        ("İstanbul", "istanbul"),
        ("GALATASARAY", "galatasaray"),
        ("FENERBAHÇE", "fenerbahçe"),
    ])
    def test_examples(self, surface, folded):
        assert fold_case(surface) == folded

    def test_galatasaray_letter_by_letter(self):
        mapping = {"G": "g", "A": "a", "L": "l", "T": "t", "S": "s", "R": "r", "Y": "y"}
        assert fold_case("GALATASARAY") == "".join(mapping[c] for c in "GALATASARAY")

    @given(any_text)
    def test_idempotent(self, text):
        assert fold_case(fold_case(text)) == fold_case(text)


class TestStopwords:
    def test_sample_tweet(self):
        toks = tokenize("ve biz galatasaraylıyız")
        kept = remove_stopwords(toks, StopwordList.from_words(["ve", "biz"]))
        assert [t.surface for t in kept] == ["galatasaraylıyız"]

    def test_empty_list_is_identity(self):
        toks = tokenize("ve biz iyi ki Galatasaraylıyız")
        assert remove_stopwords(toks, StopwordList(frozenset())) == toks

    def test_all_stopwords(self):
        assert remove_stopwords(tokenize("ve VE bu"), StopwordList.from_words(["ve", "bu"])) == []

    def test_never_drops_specials(self):
        stops = StopwordList.from_words(["#ve", "ve", ":)"])
        kept = remove_stopwords(tokenize("#ve ve :) www.ve.com"), stops)
        assert [t.kind for t in kept] == [K.HASHTAG, K.EMOTICON, K.URL]

    def test_entries_must_be_folded(self):
        with pytest.raises(ValueError):
            StopwordList(frozenset({"Ve"}))

    def test_file_format(self):
        stops = parse_stopwords("# comment\nVe\n\n  biz \n")
        assert stops.entries == {"ve", "biz"}

    def test_default_list_is_folded(self):
        assert "ve" in default_stopwords()


@settings(max_examples=100)
@given(tweet_text, st.sets(st.sampled_from(["a", "ı", "i", "w", "d", "ç"])))
def test_stopword_output_is_subsequence(text, words):
    toks = tokenize(text)
    kept = remove_stopwords(toks, StopwordList.from_words(words))
    it = iter(toks)
    assert all(any(k == t for t in it) for k in kept)


class TestFlags:
    def test_hashtag(self):
        assert detect_flags(tokenize("hazır mıyız ? #Fenerinmaçıvar")).has_hashtag

    def test_positive_emoticon(self):
        f = detect_flags(tokenize("Bu grup haşlar Galatasarayı :D"), LEX)
        assert ":D" in LEX.positive
        assert f.has_pos_emoticon and not f.has_neg_emoticon

    def test_plain(self):
        assert not any(detect_flags(tokenize("ve biz iyi ki Galatasaraylıyız")))

    def test_link_and_negative(self):
        f = detect_flags(tokenize("bak http://x.co :("))
        assert f.has_link and f.has_neg_emoticon

    @settings(max_examples=100)
    @given(tweet_text, tweet_text)
    def test_monotone(self, a, b):
        ta, tb = tokenize(a), tokenize(b)
        before = detect_flags(ta)
        after = detect_flags(ta + tb)
        assert all(y for x, y in zip(before, after) if x)


class TestLexicon:
    def test_seed_entries(self):
        assert {":)", ":D", "<3"} <= LEX.positive
        assert {":(", ":\\"} <= LEX.negative

    def test_disjoint(self):
        with pytest.raises(ValueError, match="both"):
            EmoticonLexicon(frozenset({":)"}), frozenset({":)"}))

    def test_parse(self):
        lex = parse_emoticons("POS\t:)\nNEG\t:(\n")
        assert lex.positive == {":)"} and lex.negative == {":("}

    def test_parse_error(self):
        with pytest.raises(ValueError, match="line 1"):
            parse_emoticons("HAPPY\t:)\n")

    def test_custom_lexicon_changes_tokens(self):
        lex = EmoticonLexicon(frozenset({"^^"}), frozenset())
        assert [t.kind for t in tokenize("iyi ^^", lex)] == [K.WORD, K.EMOTICON]

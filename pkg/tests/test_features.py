import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stancesvm.corpus import Tweet
from stancesvm.features import (
    ALL_FAMILIES,
    FeatureConfig,
    SparseVector,
    Vocabulary,
    build_vocabulary,
    ne_terms,
    prepare,
    prepare_all,
    vectorize,
)
from stancesvm.ner import AnnotationError, EntitySpan, EntityType
from stancesvm.text import StopwordList

from conftest import AGAINST, FAVOR, T1

ORG = EntityType.ORGANIZATION
NO_STOPS = StopwordList(frozenset())


def tw(text, tid="1", label=FAVOR):
    return Tweet(tid, text, T1, label)


def prep(*texts):
    return [prepare(tw(t, str(i)), NO_STOPS) for i, t in enumerate(texts)]


class TestConfig:
    def test_needs_a_family(self):
        with pytest.raises(ValueError, match="at least one"):
            FeatureConfig(use_unigrams=False)

    def test_from_families(self):
        cfg = FeatureConfig.from_families("unigram, hashtag,ne")
        assert cfg.families == ("unigram", "ne", "hashtag")
        assert cfg.text_families == ("unigram", "ne") and cfg.flag_families == ("hashtag",)

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="trigram"):
            FeatureConfig.from_families("unigram,trigram")

    def test_min_freq(self):
        with pytest.raises(ValueError):
            FeatureConfig(min_term_freq=0)


class TestVocabulary:
    def test_unigrams(self):
        vocab = build_vocabulary(prep("a b", "b c"), FeatureConfig())
        assert vocab.terms == {"unigram": {"a": 0, "b": 1, "c": 2}}
        assert vocab.size == 3 == vocab.dimension

    def test_min_term_freq(self):
        vocab = build_vocabulary(prep("a b", "b c"), FeatureConfig(min_term_freq=2))
        assert vocab.terms["unigram"] == {"b": 0}

    def test_bigrams(self):
        vocab = build_vocabulary(prep("a b c"), FeatureConfig(use_unigrams=False, use_bigrams=True))
        assert set(vocab.terms["bigram"]) == {"a_b", "b_c"}

    def test_families_laid_out_in_order(self):
        cfg = FeatureConfig(use_bigrams=True, use_hashtag_flag=True, use_link_flag=True)
        vocab = build_vocabulary(prep("b a", "a c"), cfg)
        assert vocab.terms["unigram"] == {"a": 0, "b": 1, "c": 2}
        assert vocab.terms["bigram"] == {"a_c": 3, "b_a": 4}
        assert (vocab.flag_index("hashtag"), vocab.flag_index("link")) == (5, 6)

    def test_folded_and_stopwords_removed(self):
        stops = StopwordList.from_words(["ve"])
        pts = [prepare(tw("GALATASARAY ve İstanbul"), stops)]
        assert set(build_vocabulary(pts, FeatureConfig()).terms["unigram"]) == {"galatasaray", "istanbul"}

    def test_no_case_fold(self):
        pts = [prepare(tw("Galatasaray galatasaray"), NO_STOPS, case_fold=False)]
        assert len(build_vocabulary(pts, FeatureConfig()).terms["unigram"]) == 2

    def test_empty_training_set(self):
        with pytest.raises(ValueError, match="empty"):
            build_vocabulary([], FeatureConfig())

    def test_dump_parse_round_trip(self):
        cfg = FeatureConfig(use_bigrams=True, use_named_entities=True, use_hashtag_flag=True,
                            use_neg_emoticon_flag=True)
        vocab = build_vocabulary(prep("a b #x", "b c :("), cfg)
        text = vocab.dump()
        again = Vocabulary.parse(text)
        assert again == vocab
        assert again.terms["ne"] == {}
        assert "unigram\t#x\t0\nunigram\ta\t1\n" in text

    def test_parse_rejects_gaps(self):
        with pytest.raises(ValueError, match="dense"):
            Vocabulary.parse("unigram\ta\t0\nunigram\tb\t2\n")

    def test_parse_rejects_unknown_family(self):
        with pytest.raises(ValueError, match="line 1"):
            Vocabulary.parse("trigram\ta\t0\n")


class TestVectorize:
    def test_hashtag_reserved_index(self):
        cfg = FeatureConfig(use_hashtag_flag=True)
        pts = prep("hazır mıyız ? #Fenerinmaçıvar", "ve biz")
        vocab = build_vocabulary(pts, cfg)
        vec = vectorize(pts[0], vocab, cfg)
        assert vocab.flag_index("hashtag") == vocab.size
        assert vec.max_index == vocab.size
        assert dict(vec)[vocab.size] == 1.0
        assert vocab.size not in dict(vectorize(pts[1], vocab, cfg))

    def test_hashtag_is_also_a_term(self):
        vocab = build_vocabulary(prep("#Fenerinmaçıvar"), FeatureConfig())
        assert "#fenerinmaçıvar" in vocab.terms["unigram"]

    def test_empty_vector(self):
        cfg = FeatureConfig(use_hashtag_flag=True)
        vocab = build_vocabulary(prep("a b"), cfg)
        vec = vectorize(prep("x y")[0], vocab, cfg)
        assert len(vec) == 0 and vec == SparseVector()

    def test_gold_ne_feature(self):
        cfg = FeatureConfig(use_unigrams=False, use_named_entities=True)
        text = "Galatasarayı yendik"
        pt = prepare(tw(text), NO_STOPS, entities=[EntitySpan(0, 11, ORG, "Galatasaray")])
        vocab = build_vocabulary([pt], cfg)
        assert vocab.terms["ne"] == {"galatasaray": 0}
        assert vectorize(pt, vocab, cfg) == SparseVector((0,), (1.0,))

    def test_values_are_binary(self):
        pts = prep("a a a b")
        vec = vectorize(pts[0], build_vocabulary(pts, FeatureConfig()))
        assert vec.values == (1.0, 1.0)

    def test_cfg_must_match_vocab(self):
        vocab = build_vocabulary(prep("a"), FeatureConfig())
        with pytest.raises(ValueError, match="does not match"):
            vectorize(prep("a")[0], vocab, FeatureConfig(use_link_flag=True))

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError, match="no text"):
            prepare(tw("   "))


class TestNeTerms:
    def test_suffix_excluded_by_boundaries(self):
        t = tw("Galatasarayı yendik")
        assert ne_terms(t, [EntitySpan(0, 11, ORG, "Galatasaray")]) == ["galatasaray"]

    def test_empty(self):
        assert ne_terms(tw("x"), []) == []

    def test_duplicates_collapse(self):
        t = tw("Galatasaray ve GALATASARAY")
        spans = [EntitySpan(0, 11, ORG, "Galatasaray"), EntitySpan(15, 26, ORG, "GALATASARAY")]
        assert ne_terms(t, spans) == ["galatasaray"]

    def test_out_of_bounds(self):
        with pytest.raises(AnnotationError, match="out of bounds"):
            ne_terms(tw("abc"), [EntitySpan(1, 9, ORG, "bc")])


class TestSparseVector:
    def test_order_enforced(self):
        with pytest.raises(ValueError):
            SparseVector((2, 1), (1.0, 1.0))

    def test_from_dict_drops_zeros(self):
        assert SparseVector.from_dict({3: 1, 1: 0, 0: 2}) == SparseVector((0, 3), (2.0, 1.0))

    def test_dot(self):
        assert SparseVector((0, 2, 9), (1.0, 1.0, 1.0)).dot([0.5, 7.0, 2.0]) == 2.5


# --- properties -------------------------------------------------------------

_words = st.sampled_from(["gol", "maç", "Hakem", "GOL", "#gs", "#GS", "http://x.co", ":)", ":(", "ve", "?"])
_texts = st.lists(_words, min_size=1, max_size=8).map(" ".join)
_cfgs = st.sets(st.sampled_from(ALL_FAMILIES), min_size=1).map(FeatureConfig.from_families)


def _corpus(texts):
    return [prepare(tw(t, str(i), FAVOR if i % 2 else AGAINST), NO_STOPS,
                    entities=[EntitySpan(0, len(t.split()[0]), ORG, t.split()[0])])
            for i, t in enumerate(texts)]


@settings(max_examples=100, deadline=None)
@given(st.lists(_texts, min_size=1, max_size=6), _texts, _cfgs)
def test_indices_within_dimension(train, test, cfg):
    vocab = build_vocabulary(_corpus(train), cfg)
    vec = vectorize(_corpus([test])[0], vocab, cfg)
    assert vec.max_index < vocab.size + len(cfg.flag_families) == vocab.dimension


@settings(max_examples=100, deadline=None)
@given(st.lists(_texts, min_size=1, max_size=6), _texts, _cfgs, st.sampled_from(ALL_FAMILIES))
def test_extra_family_is_superset(train, test, cfg, extra):
    """Adding a family keeps every entry of the shared families (compared by term)."""
    bigger = FeatureConfig.from_families(set(cfg.families) | {extra})
    pts = _corpus(train)
    pt = _corpus([test])[0]
    small_v, big_v = build_vocabulary(pts, cfg), build_vocabulary(pts, bigger)

    def named(vec, vocab):
        inv = {i: (f, t) for f, table in vocab.terms.items() for t, i in table.items()}
        inv.update({vocab.flag_index(f): (f, "") for f in vocab.flags})
        return {inv[i] for i in vec.indices}

    assert named(vectorize(pt, small_v), small_v) <= named(vectorize(pt, big_v), big_v)


@settings(max_examples=100, deadline=None)
@given(st.lists(_texts, min_size=1, max_size=6), _texts, _cfgs)
def test_deterministic(train, test, cfg):
    a = vectorize(_corpus([test])[0], build_vocabulary(_corpus(train), cfg), cfg)
    b = vectorize(_corpus([test])[0], build_vocabulary(_corpus(list(train)), cfg), cfg)
    assert a == b


@settings(max_examples=100, deadline=None)
@given(st.lists(_texts, min_size=2, max_size=10), _cfgs)
def test_no_training_fold_leakage(texts, cfg):
    pts = _corpus(texts)
    train, test = pts[: len(pts) // 2], pts[len(pts) // 2:]
    vocab = build_vocabulary(train, cfg)
    seen = {(f, term) for f in vocab.terms for pt in train for term in pt.family_terms(f)}
    inv = {i: (f, t) for f, table in vocab.terms.items() for t, i in table.items()}
    for pt in test:
        for i in vectorize(pt, vocab, cfg).indices:
            if i < vocab.size:
                assert inv[i] in seen


def test_prepare_all_keys_by_id():
    tweets = [tw("a", "x"), tw("b", "y")]
    out = prepare_all(tweets, NO_STOPS, entities={"y": [EntitySpan(0, 1, ORG, "b")]})
    assert list(out) == ["x", "y"] and out["y"].entities == ("b",)

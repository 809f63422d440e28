"""Synthetic stance corpora with planted signal, for tests and demos.

Nothing here resembles real tweets beyond the vocabulary style; every
generated data set carries the version tag ``synthetic``.
"""

from __future__ import annotations

import random

from .corpus import Dataset, StanceLabel, Target, Tweet

FAVOR_WORDS = ("harika", "efsane", "şampiyon", "gurur", "aşkım", "bravo",
               "muhteşem", "sevdam", "destan", "zafer", "alkış", "kral")
AGAINST_WORDS = ("rezalet", "berbat", "yazık", "utanç", "çöp", "istifa",
                 "felaket", "beceriksiz", "sahtekar", "bıktık", "fiyasko", "kepazelik")
NOISE_WORDS = tuple(
    "maç gol hakem stat taraftar sezon transfer hoca kadro forma lig puan "
    "bugün yarın akşam saat deplasman kupa tribün bilet skor teknik direktör "
    "futbolcu saha top penaltı korner ofsayt kart sarı kırmızı dakika devre "
    "antrenman kamp haber basın açıklama başkan yönetim kulüp derbi rakip "
    "ilk son ikinci yeni eski büyük küçük uzun kısa hızlı yavaş güzel".split()
)
TARGET_NAMES = {Target.TARGET1: "Galatasaray", Target.TARGET2: "Fenerbahçe"}


def planted_corpus(
    n_per_class: int = 100,
    target: Target = Target.TARGET1,
    seed: int = 0,
    signal_free_rate: float = 0.03,
    favor_hashtag_rate: float = 1.0,
    against_hashtag_rate: float = 0.0,
    n_noise: tuple[int, int] = (3, 5),
    n_signal: tuple[int, int] = (2, 3),
    disagreement_rate: float = 0.0,
    id_prefix: str = "s",
) -> Dataset:
    """Tweets whose stance is carried by class-specific words.

    A ``signal_free_rate`` share of tweets carries no class word at all, so
    only the hashtag flag can tell them apart; hashtags are unique per tweet
    and therefore never useful as unigrams. With ``disagreement_rate`` > 0 a
    second annotation is added that flips that share of labels.
    """
    rng = random.Random(seed)
    tweets = []
    counter = 0
    for label in (StanceLabel.FAVOR, StanceLabel.AGAINST):
        own = FAVOR_WORDS if label is StanceLabel.FAVOR else AGAINST_WORDS
        tag_rate = favor_hashtag_rate if label is StanceLabel.FAVOR else against_hashtag_rate
        for _ in range(n_per_class):
            counter += 1
            words = [TARGET_NAMES[target]]
            words += rng.sample(NOISE_WORDS, rng.randint(*n_noise))
            if rng.random() >= signal_free_rate:
                words += rng.sample(own, rng.randint(*n_signal))
            rng.shuffle(words)
            if rng.random() < tag_rate:
                words.append(f"#etiket{counter:04d}")
            label_b = label
            if disagreement_rate and rng.random() < disagreement_rate:
                label_b = StanceLabel.AGAINST if label is StanceLabel.FAVOR else StanceLabel.FAVOR
            tweets.append(Tweet(f"{id_prefix}{counter:04d}", " ".join(words), target, label,
                                label_b if disagreement_rate else None))
    rng.shuffle(tweets)
    return Dataset("synthetic", tuple(tweets))


def agreement_fixture(per_cell: dict[tuple[Target, StanceLabel], tuple[int, int]], text: str = "") -> Dataset:
    """Dual-annotated records with exactly ``(n_tweets, n_disagreeing)`` per cell.

    Disagreeing tweets come first within each cell; texts are blank unless
    ``text`` is given, as in annotation-only releases.
    """
    tweets = []
    i = 0
    for (target, label), (n, n_dis) in per_cell.items():
        other = StanceLabel.AGAINST if label is StanceLabel.FAVOR else StanceLabel.FAVOR
        for j in range(n):
            i += 1
            tweets.append(Tweet(f"a{i:05d}", text, target, label, other if j < n_dis else label))
    return Dataset("synthetic", tuple(tweets))

import pytest

from stancesvm.corpus import Dataset, StanceLabel, Target, Tweet
from stancesvm.ner import EntitySpan, EntityType

FAVOR, AGAINST = StanceLabel.FAVOR, StanceLabel.AGAINST
T1, T2 = Target.TARGET1, Target.TARGET2

# Declared named-entity counts of the first data set version, per
# (target, stance): tweets, person, location, organization.
ENTITY_COUNTS_V1 = {
    (T1, FAVOR): (175, 12, 17, 207),
    (T1, AGAINST): (175, 70, 4, 221),
    (T2, FAVOR): (175, 8, 24, 247),
    (T2, AGAINST): (175, 69, 18, 277),
}

_NAMES = {EntityType.PERSON: "Alex", EntityType.LOCATION: "Kadıköy", EntityType.ORGANIZATION: "Galatasaray"}


def entity_fixture(manifest):
    """Tweets plus gold spans realizing the declared per-cell entity counts.

    Entities of a cell are dealt round-robin over its tweets; each tweet's
    text is its entity names separated by the filler word "ve".
    """
    tweets, gold = [], {}
    i = 0
    for (target, label), (n_tweets, *per_type) in manifest.items():
        bag = [et for et, n in zip(EntityType, per_type) for _ in range(n)]
        slots = [[] for _ in range(n_tweets)]
        for k, et in enumerate(bag):
            slots[k % n_tweets].append(et)
        for types in slots:
            i += 1
            tid = f"ne{i:04d}"
            text, spans = "maç", []
            for et in types:
                text += " ve "
                start = len(text)
                text += _NAMES[et]
                spans.append(EntitySpan(start, len(text), et, _NAMES[et]))
            tweets.append(Tweet(tid, text, target, label, label))
            if spans:
                gold[tid] = spans
    return Dataset("synthetic", tuple(tweets)), gold


@pytest.fixture
def entity_counts_fixture():
    return entity_fixture(ENTITY_COUNTS_V1)


def write(path, text):
    path.write_text(text, encoding="utf-8", newline="")
    return path

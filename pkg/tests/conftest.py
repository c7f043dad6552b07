import random

import pytest

from itreesim.laws import default_events, random_itree, random_ktree


@pytest.fixture
def rng():
    return random.Random(20240817)


@pytest.fixture
def events():
    return default_events(3)


@pytest.fixture
def tree_corpus(rng, events):
    """Small finite trees plus the rng used to build more."""
    return [random_itree(rng, events) for _ in range(60)]


@pytest.fixture
def ktree_corpus(rng, events):
    return [random_ktree(rng, events) for _ in range(12)]

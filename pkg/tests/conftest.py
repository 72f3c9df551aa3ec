import random

import pytest


@pytest.fixture
def rng():
    # fixed seed: property tests must be reproducible
    return random.Random(20260822)

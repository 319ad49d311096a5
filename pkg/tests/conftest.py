import numpy as np
import pytest

import svdmark as sm
import thresholds as th


def make_cover(n=256):
    return sm.synthetic_image(n, n, th.COVER_SEED, roughness=2.0, contrast=52.0)

def make_watermark(n=256):
    return sm.synthetic_image(n, n, th.WM_SEED, roughness=1.2, contrast=70.0)

def make_reference(seed, n=256):
    return sm.synthetic_image(n, n, seed, roughness=1.9, contrast=55.0)


@pytest.fixture(scope="session")
def cover256():
    return make_cover(256)

@pytest.fixture(scope="session")
def watermark256():
    return make_watermark(256)

@pytest.fixture(scope="session")
def cover64():
    return make_cover(64)

@pytest.fixture(scope="session")
def watermark64():
    return make_watermark(64)

@pytest.fixture(scope="session")
def identity():
    return sm.Identity.from_string(th.EMBED_ID)


def seeded_matrix(seed, rows, cols, low=0.0, high=255.0):
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.uniform(low, high, (rows, cols))

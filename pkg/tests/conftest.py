import numpy as np
import pytest

from lsdc.data import FeatureMatrix, RngState, gen_blobs, ring_centers


@pytest.fixture
def np_rng():
    return np.random.default_rng(1234)


@pytest.fixture
def rng():
    return RngState(42)


@pytest.fixture
def blobs():
    return gen_blobs(50, ring_centers(4, 3.0), 0.15, RngState(7))


@pytest.fixture
def small_features(np_rng):
    return FeatureMatrix(np_rng.normal(size=(12, 3)))

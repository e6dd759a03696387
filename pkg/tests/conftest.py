import math

import numpy as np
import pytest
from hypothesis import assume, settings
from hypothesis import strategies as st

from cvbell import StandardForm
from cvbell.covariance import physical_mask
from cvbell.verification import sample_arrays

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def standard_forms(draw, n_max=3.0):
    """Physical standard forms drawn like the library's own sampler."""
    n = draw(st.floats(0.5, n_max))
    m = draw(st.floats(0.5, n_max))
    f1 = draw(st.floats(-1.0, 1.0))
    f2 = draw(st.floats(-1.0, 1.0))
    root = math.sqrt(n * m)
    sf = StandardForm(n, m, f1 * root, f2 * root)
    assume(physical_mask(sf.matrix()[None])[0])
    return sf


@pytest.fixture(scope="session")
def uniform_batch():
    """The 10^5-state sample shared by the acceptance criteria."""
    return sample_arrays(100_000, 42, 3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

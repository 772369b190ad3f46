import numpy as np
import pytest

from ambclink import load_scenario
from ambclink.channel import draw_channels


@pytest.fixture(scope="session")
def paper_params():
    return load_scenario({}, paper_defaults=True)


@pytest.fixture(scope="session")
def fixed_realization(paper_params):
    """One seeded channel draw shared by tests that need a fixed channel."""
    rng = np.random.default_rng(np.random.SeedSequence(20240801))
    return draw_channels(paper_params, rng)


def rel_err(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0

import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def relabel(complex, ray_perm, cell_perm, reverse=False):
    """Apply a ray permutation, shuffle cell order, optionally reverse every walk."""
    from jammedfan.fan import FanComplex

    cells = [tuple(ray_perm[r] for r in c) for c in complex.cells]
    if reverse:
        cells = [tuple(reversed(c)) for c in cells]
    return FanComplex(complex.ray_count, [cells[i] for i in cell_perm])


@pytest.fixture
def rng():
    return random.Random(1234)

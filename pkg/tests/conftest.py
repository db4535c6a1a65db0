import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gl2d import field
from gl2d.induction import InductionSpace
from gl2d.od import RingParams
from gl2d.weight import WeightParams


@pytest.fixture(scope="session")
def f49():
    return field(7, 2, 1)


@pytest.fixture(scope="session")
def f49w2():
    return field(7, 1, 2)


@pytest.fixture(scope="session")
def f9():
    return field(3, 1, 2)


@pytest.fixture(scope="session")
def f4():
    return field(2, 2, 1)


@pytest.fixture(scope="session")
def space_a(f49):
    """Configuration A: p=7, f=2, w=1, e=1, r=(3,3), exact backend."""
    ring = RingParams.make(f49, e=1, ndigits=6)
    return InductionSpace(ring, WeightParams(f49, (3, 3)))


@pytest.fixture(scope="session")
def space_b(f49w2):
    """Configuration B: p=7, f=1, w=2, e=1, r=(3,3), exact backend."""
    ring = RingParams.make(f49w2, e=1, ndigits=6)
    return InductionSpace(ring, WeightParams(f49w2, (3, 3)))


@pytest.fixture(scope="session")
def space_c(f49w2):
    """Configuration C: p=7, f=1, w=2, e=2, tracked backend."""
    ring = RingParams.make(f49w2, e=2, ndigits=8)
    return InductionSpace(ring, WeightParams(f49w2, (3, 3)))


@pytest.fixture(scope="session")
def space_small(f9):
    """Small space for exhaustive checks: p=3, f=1, w=2, r=(1,1)."""
    ring = RingParams.make(f9, e=1, ndigits=6)
    return InductionSpace(ring, WeightParams(f9, (1, 1)))

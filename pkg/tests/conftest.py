from __future__ import annotations

import pytest
from hypothesis import settings

from coarseprox.backends import QHalfLine, ZMetric

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def zb():
    return ZMetric()


@pytest.fixture
def qb():
    return QHalfLine()

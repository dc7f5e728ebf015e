"""Shared fixtures for barrier tests."""

import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from tests.barriers.test_helpers import BarrierTestHelpers  # noqa: E402


@pytest.fixture
def reference_barrier():
    """Feasible weighted-Euclidean barrier for m = 2, p = 1.5."""
    return BarrierTestHelpers.euclidean_barrier(T=256.0)


@pytest.fixture
def weight_envelope():
    return BarrierTestHelpers.weight().envelope()

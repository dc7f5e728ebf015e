"""Shared fixtures for solver tests."""

import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from tests.solver.test_helpers import SolverTestHelpers  # noqa: E402


@pytest.fixture
def flat_params():
    """m = 2, p = 1.5 on the flat ball of radius 5 with 100 cells."""
    return SolverTestHelpers.euclidean_params()


@pytest.fixture
def flat_grid(flat_params):
    return flat_params.build_grid()

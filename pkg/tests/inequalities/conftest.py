"""Shared fixtures for functional inequality tests."""

import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from rdlab.model.geometry import RadialGeometry  # noqa: E402
from rdlab.runtime.inequalities import RayleighProblem  # noqa: E402


@pytest.fixture
def unit_ball_problem():
    """Flat unit ball, unweighted, 200 cells."""
    return RayleighProblem.build(RadialGeometry(3), None, 1.0, 200)

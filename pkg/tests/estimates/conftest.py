"""Shared fixtures for estimate tests."""

import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from rdlab.model.geometry import Grid, RadialGeometry  # noqa: E402


@pytest.fixture
def unit_ball_grid():
    """Flat unit ball with 200 cells."""
    return Grid.build(RadialGeometry(3), None, 1.0, 200)

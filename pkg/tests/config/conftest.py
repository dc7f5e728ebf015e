"""Shared fixtures for configuration tests."""

import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from tests.config.test_helpers import ConfigTestHelpers  # noqa: E402


@pytest.fixture
def scenarios_dir():
    return project_root / "scenarios"


@pytest.fixture
def minimal_data():
    return ConfigTestHelpers.minimal()

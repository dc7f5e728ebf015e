"""Shared fixtures for scenario and CLI tests."""

import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from rdlab.runtime.scenario import run_scenario  # noqa: E402
from tests.scenario.test_helpers import ScenarioTestHelpers  # noqa: E402


@pytest.fixture
def project_dir():
    return project_root


@pytest.fixture
def simulate_report():
    """Report of a zero-datum simulation."""
    return run_scenario(ScenarioTestHelpers.config("simulate"), ScenarioTestHelpers.tolerances())


@pytest.fixture(autouse=True)
def clear_tolerance_env(monkeypatch):
    monkeypatch.delenv("RDLAB_TOL", raising=False)

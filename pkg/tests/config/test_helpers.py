"""Helper methods for configuration tests."""

import copy
import json

from rdlab.model.config import ScenarioConfigParser
from rdlab.model.validator import ScenarioValidator


class ConfigTestHelpers:
    """Helper class for configuration test functions."""

    MINIMAL = {"name": "demo", "kind": "simulate", "model": {"m": 2.0, "p": 1.5}}

    @staticmethod
    def minimal(**sections):
        data = copy.deepcopy(ConfigTestHelpers.MINIMAL)
        data.update(sections)
        return data

    @staticmethod
    def parse(data):
        return ScenarioConfigParser().parse_dict(data)

    @staticmethod
    def errors(data):
        """Validation messages for a config dictionary."""
        return [str(e) for e in ScenarioValidator(ConfigTestHelpers.parse(data)).validate()]

    @staticmethod
    def write(tmp_path, data, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path

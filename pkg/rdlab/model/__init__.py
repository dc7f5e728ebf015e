"""Model classes, configuration and validation."""

from .exceptions import (
    RDLabError,
    GeometryError,
    ParameterError,
    SolverError,
    ConfigError,
    EstimateError,
)
from .config import ScenarioConfigParser, parse_scenario_file

__all__ = [
    'RDLabError',
    'GeometryError',
    'ParameterError',
    'SolverError',
    'ConfigError',
    'EstimateError',
    'ScenarioConfigParser',
    'parse_scenario_file',
]

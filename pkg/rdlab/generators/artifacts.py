"""CSV and JSON artifacts of a scenario run."""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from ..runtime.scenario import TRAJECTORY_COLUMNS, RunReport

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def trajectory_frame(report: RunReport) -> pd.DataFrame:
    """One row per checkpoint; columns that do not apply stay empty."""
    rows = [row.values() for row in report.rows]
    frame = pd.DataFrame(rows, columns=list(TRAJECTORY_COLUMNS), dtype=float)
    return frame.replace([np.inf, -np.inf], np.nan)


def profiles_frame(report: RunReport) -> pd.DataFrame:
    """Long-format (t, r, u) table of the stored profiles."""
    if report.centers is None or not report.profiles:
        return pd.DataFrame(columns=["t", "r", "u"], dtype=float)
    pieces = [
        pd.DataFrame({"t": np.full(report.centers.size, t), "r": report.centers, "u": u})
        for t, u in sorted(report.profiles.items())
    ]
    return pd.concat(pieces, ignore_index=True)


class ArtifactWriter:
    """Writes trajectory.csv, profiles.csv and report.json into one directory."""

    def __init__(self, report: RunReport):
        self.report = report

    def write_trajectory(self, output_path) -> Path:
        path = Path(output_path) / "trajectory.csv"
        trajectory_frame(self.report).to_csv(path, index=False, float_format=FLOAT_FORMAT,
                                             na_rep="")
        return path

    def write_profiles(self, output_path) -> Path:
        path = Path(output_path) / "profiles.csv"
        profiles_frame(self.report).to_csv(path, index=False, float_format=FLOAT_FORMAT)
        return path

    def write_json(self, output_path) -> Path:
        path = Path(output_path) / "report.json"
        path.write_text(json.dumps(self.report.as_dict(), sort_keys=True, indent=2) + "\n")
        return path

    def generate(self, output_path) -> list:
        """Write every artifact and return the paths."""
        output = Path(output_path)
        output.mkdir(parents=True, exist_ok=True)
        paths = [self.write_trajectory(output), self.write_json(output)]
        if self.report.profiles:
            paths.append(self.write_profiles(output))
        logger.info("wrote %d artifacts to %s", len(paths), output)
        return paths

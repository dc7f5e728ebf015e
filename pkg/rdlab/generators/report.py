"""Markdown summary of a scenario run."""

import math
from pathlib import Path

from jinja2 import Environment, FileSystemLoader

from ..runtime.scenario import RunReport


def format_number(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, float)):
        if isinstance(value, float) and not math.isfinite(value):
            return str(value)
        return f"{value:.6g}"
    return str(value)


class ReportGenerator:
    """Renders report.md from a RunReport."""

    def __init__(self, report: RunReport):
        self.report = report

    def render(self) -> str:
        templates_dir = Path(__file__).parent / 'templates'
        env = Environment(
            loader=FileSystemLoader(str(templates_dir)),
            trim_blocks=False,
            lstrip_blocks=False
        )
        env.filters['num'] = format_number
        template = env.get_template('report.md.j2')
        return template.render(report=self.report, data=self.report.as_dict())

    def generate(self, output_path: str) -> Path:
        """Write report.md into output_path."""
        output_file = Path(output_path) / 'report.md'
        output_file.parent.mkdir(parents=True, exist_ok=True)
        output_file.write_text(self.render())
        return output_file

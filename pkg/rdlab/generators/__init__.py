"""Writers for run artifacts: CSV tables, JSON and Markdown reports."""

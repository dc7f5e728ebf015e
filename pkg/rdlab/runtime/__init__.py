"""Radial solver, comparison ladders, functional inequalities and the scenario runner."""

"""Same-score streaks in season-structured sports: counting, modeling, simulation."""

__version__ = "0.1.0"

"""Exact local computations for torus periods of GL(2) representations over Q_p."""

__version__ = "0.1.0"

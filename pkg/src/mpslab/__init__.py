"""Tick-level futures analysis: increments, distribution fits, independence
tests, correlation dimension and maximum profit strategies."""

__version__ = "0.1.0"

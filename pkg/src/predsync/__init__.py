"""Deterministic synchronous simulator and prediction-augmented distributed
graph algorithms (MIS, maximal matching, vertex and edge coloring), with
exact error-measure oracles, template combinators and a bench CLI."""

__version__ = "0.1.0"

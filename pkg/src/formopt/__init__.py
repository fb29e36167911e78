"""Metaheuristic optimization and surrogate modelling for formulation design."""

__version__ = "0.1.0"

"""Planar-K4 colorings of the hypercube: SAT encoding, parameter-set
transfers, square statistics and tower-notation bounds."""

__version__ = "0.1.0"

"""Discrete, exact-arithmetic version of the LSB-to-KKM extension argument."""

__version__ = "0.1.0"

"""Least-squares fitting under Gaussian, stable and stretched Gaussian noise."""

__version__ = "0.1.0"

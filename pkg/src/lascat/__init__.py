"""Bayesian shape reconstruction of sound-soft obstacles from limited-aperture far-field data."""

__version__ = "0.1.0"

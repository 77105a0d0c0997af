"""Tangent circle chains, inversion, and numeric checks of their incidence properties."""

__version__ = "0.1.0"

"""Separability analysis of the bi-Helmholtz equation and the clamped circular plate."""

__version__ = "0.1.0"

"""Entanglement dynamics of two-mode Gaussian states in independent Lorentzian reservoirs."""

__version__ = "0.1.0"

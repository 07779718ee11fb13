"""Simulator for a parametrically squeezed magnon-phonon-spin hybrid system."""

__version__ = "0.1.0"

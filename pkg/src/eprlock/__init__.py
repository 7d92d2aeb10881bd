"""Desk-scale simulation and analysis toolkit for coherent phase control
of a two-color EPR entanglement source."""

__version__ = "0.1.0"

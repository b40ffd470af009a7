"""Exact verification toolkit for Iwahori-fixed vectors, intertwining operators and local zeta integrals."""

__version__ = "0.1.0"

"""Numerical laboratory for isomonodromic deformations of rank-2 Fuchsian
systems with six poles and their genus-2 hyperelliptic lifts."""

__version__ = "0.1.0"

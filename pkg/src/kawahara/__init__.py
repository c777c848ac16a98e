"""Pseudo-spectral toolkit for the modified Kawahara equation on the rescaled torus."""

__version__ = "0.1.0"

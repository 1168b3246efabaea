"""Combinatorial PFH of monotone twist maps of the sphere and disc."""

__version__ = "0.1.0"

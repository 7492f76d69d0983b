"""Symbolic-numeric simulator for planar spacecraft-manipulator / debris collisions."""

__version__ = "0.1.0"

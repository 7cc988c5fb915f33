"""Homogeneous structures of linear type on eps-Kaehler and eps-quaternion Kaehler models."""

__version__ = "0.1.0"

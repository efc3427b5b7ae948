"""Exact computations with the mod-2 Steenrod algebra and unstable modules."""

__version__ = "0.1.0"

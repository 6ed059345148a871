"""Exact finitary models of measure-preserving transformations and totipotent actions of free groups."""

__version__ = "0.1.0"

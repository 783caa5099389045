"""Partial actions of finite groups on finite-dimensional *-algebras and their envelopes."""

__version__ = "0.1.0"

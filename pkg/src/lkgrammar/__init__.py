"""Herbrand grammars for LK proofs with prenex Π2/Σ2 cuts."""

__version__ = "0.1.0"

"""Symbolic dynamics of piecewise affine interval maps via Hofbauer's Markov diagram."""

__version__ = "0.1.0"

"""High-precision residual-verification lab for Hankel determinants of
singularly deformed Laguerre weights."""

from .params import PrecisionContext, WeightParams, to_fraction, to_mpf

__all__ = ["WeightParams", "PrecisionContext", "to_fraction", "to_mpf"]

__version__ = "0.1.0"

"""Bound sets and symbolic bound expressions."""

from morphic_toolkit.analysis.bounds import BoundExpression, BoundSet, bound_set

__all__ = ["BoundExpression", "BoundSet", "bound_set"]

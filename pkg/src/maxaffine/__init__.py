"""Exact and certified computations around maximal affine approximation of Lipschitz maps."""

__version__ = "0.1.0"

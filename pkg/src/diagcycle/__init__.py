"""Decide vanishing of modified diagonal cycles on genus-3 modular curves
through local trilinear forms."""

__version__ = "0.1.0"

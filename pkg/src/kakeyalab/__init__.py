"""Exact-arithmetic laboratory for Kakeya-style tube unions and dyadic martingales."""

__version__ = "0.1.0"

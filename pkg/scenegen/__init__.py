"""Desk-scale multiview scene generation, step caching, quantized attention and gaussian reconstruction."""

__version__ = "0.1.0"

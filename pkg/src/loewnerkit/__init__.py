"""Rational surrogate models from frequency-response samples."""
__version__ = "0.1.0"

"""Exact computations with framed tangles, the BMW algebra and the
symplectic R-matrix representations."""

__version__ = "0.1.0"

"""Convex-analysis toolkit for constructing and verifying bipotentials."""

from .core import INF, ExtReal, DimensionMismatchError, as_vector, ext_add, ext_close, ext_scale, pairing
from .grids import Grid

__version__ = "0.1.0"

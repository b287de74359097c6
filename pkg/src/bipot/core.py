"""Extended-real scalars, finite-dimensional vectors and the duality pairing.

All potentials in this package map into R-bar = R union {+inf}.  Negative
infinity is unrepresentable by design: constructing it raises.  The scalar
type carries the two arithmetic conventions the rest of the package relies
on:

* addition absorbs +inf,
* ``0 * (+inf) == 0``, so that convex combinations of indicator functions
  degenerate to a single function at the endpoints of the weight interval.

Vectors are plain numpy arrays of dimension 1, 2 or 3, validated at API
boundaries by :func:`as_vector`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ExtReal",
    "INF",
    "ext_add",
    "ext_scale",
    "ext_close",
    "as_vector",
    "pairing",
    "DimensionMismatchError",
]

MAX_DIM = 3


class DimensionMismatchError(ValueError):
    """Operands live in spaces of different (or unsupported) dimension."""


@dataclass(frozen=True, slots=True)
class ExtReal:
    """A real number or +inf.  Immutable.

    Finite values and ``math.inf`` are accepted; NaN and ``-math.inf`` are
    rejected at construction.  The total order of floats already places
    every finite value below +inf, so comparisons delegate to the wrapped
    float.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v):
            raise ValueError("ExtReal cannot hold NaN")
        if v == -math.inf:
            raise ValueError("negative infinity is unrepresentable")
        object.__setattr__(self, "value", v)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @property
    def is_inf(self) -> bool:
        return self.value == math.inf

    def __float__(self) -> float:
        return self.value

    def __add__(self, other):
        return ext_add(self, other)

    __radd__ = __add__

    def __lt__(self, other) -> bool:
        return self.value < _coerce(other).value

    def __le__(self, other) -> bool:
        return self.value <= _coerce(other).value

    def __gt__(self, other) -> bool:
        return self.value > _coerce(other).value

    def __ge__(self, other) -> bool:
        return self.value >= _coerce(other).value

    def __eq__(self, other) -> bool:
        try:
            return self.value == _coerce(other).value
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __repr__(self) -> str:
        return "ExtReal(+inf)" if self.is_inf else f"ExtReal({self.value!r})"

    def to_json(self):
        """JSON form: finite reals as numbers, +inf as the string "inf"."""
        return "inf" if self.is_inf else self.value

    @staticmethod
    def from_json(obj) -> "ExtReal":
        if obj == "inf":
            return INF
        return ExtReal(float(obj))


INF = ExtReal(math.inf)


def _coerce(x) -> ExtReal:
    if isinstance(x, ExtReal):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return ExtReal(float(x))
    raise TypeError(f"cannot interpret {type(x).__name__} as ExtReal")


def ext_add(a, b) -> ExtReal:
    """Extended-real addition: +inf absorbs, commutative and associative."""
    a, b = _coerce(a), _coerce(b)
    if a.is_inf or b.is_inf:
        return INF
    return ExtReal(a.value + b.value)


def ext_scale(lam: float, a) -> ExtReal:
    """``lam * a`` for ``lam >= 0`` with the convention ``0 * (+inf) == 0``."""
    a = _coerce(a)
    if lam < 0:
        raise ValueError("ext_scale requires a nonnegative weight")
    if lam == 0:
        return ExtReal(0.0)
    if a.is_inf:
        return INF
    return ExtReal(lam * a.value)


def ext_close(a, b, tol: float = 1e-9) -> bool:
    """Approximate equality; +inf compares equal only to +inf.

    Never treats a large finite value as infinite.
    """
    a, b = _coerce(a), _coerce(b)
    if a.is_inf or b.is_inf:
        return a.is_inf and b.is_inf
    return abs(a.value - b.value) <= tol


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Validate ``x`` as a finite float vector of dimension 1..3.

    Scalars are promoted to 1-D vectors.  Raises
    :class:`DimensionMismatchError` on a wrong or unsupported dimension
    and ``ValueError`` on non-finite components.
    """
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a vector, got shape {v.shape}")
    if not 1 <= v.size <= MAX_DIM:
        raise DimensionMismatchError(f"dimension {v.size} outside 1..{MAX_DIM}")
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


def pairing(x, y) -> float:
    """Duality product <x, y>: the Euclidean dot product."""
    xv = as_vector(x)
    yv = as_vector(y, dim=xv.size)
    return float(np.dot(xv, yv))

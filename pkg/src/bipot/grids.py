"""Axis-aligned sampling grids for the numeric convex calculus.

Unbounded domains are truncated to a box ``[-R, R]^n`` before any grid
computation; every numeric conjugate or inf-convolution in this package is
exact for the truncated function and documented as such.  Default node
counts balance the O(N^2) brute-force oracles against runtime.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["Grid", "DEFAULT_RADIUS", "DEFAULT_NODES"]

DEFAULT_RADIUS = 8.0
# nodes per axis by dimension
DEFAULT_NODES = {1: 801, 2: 101, 3: 41}


@dataclass(frozen=True)
class Grid:
    """Cartesian product of strictly increasing 1-D axes (at most 3)."""

    axes: tuple[np.ndarray, ...]

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        if not 1 <= len(axes) <= 3:
            raise ValueError("grids support dimensions 1..3")
        for a in axes:
            if a.ndim != 1 or a.size < 2:
                raise ValueError("each axis needs at least 2 nodes")
            if not np.all(np.diff(a) > 0):
                raise ValueError("axis nodes must be strictly increasing")
            if not np.all(np.isfinite(a)):
                raise ValueError("axis nodes must be finite")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def uniform(cls, radius: float = DEFAULT_RADIUS, nodes: int | None = None,
                dim: int = 1) -> "Grid":
        """Uniform grid on ``[-radius, radius]^dim``."""
        n = nodes if nodes is not None else DEFAULT_NODES[dim]
        axis = np.linspace(-radius, radius, n)
        return cls(tuple(axis.copy() for _ in range(dim)))

    @classmethod
    def from_axes(cls, *axes) -> "Grid":
        return cls(tuple(np.asarray(a, dtype=float) for a in axes))

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @cached_property
    def nodes(self) -> np.ndarray:
        """All grid points, shape ``(size, dim)``, row-major axis order."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    def modulus(self) -> float:
        """Largest spacing over all axes (the grid's interpolation scale)."""
        return max(float(np.max(np.diff(a))) for a in self.axes)

    def contains(self, x) -> bool:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.size != self.dim:
            return False
        return all(a[0] <= v <= a[-1] for a, v in zip(self.axes, x))

    def interior_mask(self) -> np.ndarray:
        """Boolean mask over ``nodes`` marking points off the grid boundary."""
        masks = []
        for a in self.axes:
            m = np.ones(a.size, dtype=bool)
            m[0] = m[-1] = False
            masks.append(m)
        mesh = np.meshgrid(*masks, indexing="ij")
        out = mesh[0]
        for m in mesh[1:]:
            out = out & m
        return out.reshape(-1)

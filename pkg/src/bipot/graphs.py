"""Finite samples of multivalued operator graphs and their monotonicity.

A graph sample is a finite list of couples ``(x, y)``.  Cyclic
monotonicity asks that every tuple of couples, traversed as a cycle,
accumulates a nonpositive value.  Rather than enumerating tuples
explicitly, the checker computes the exact maximum over all cycles of
bounded length with max-plus powers of the transition matrix
``W[i, j] = <x_j - x_i, y_i>``; a closed walk of length L in this matrix
is precisely a cycle over L couples, so the two formulations return the
same maximum.  Self-transitions contribute exactly zero and are excluded
so the reported maximum is over nondegenerate cycles.

The potential reconstruction takes the best chain value from a fixed
base point, again by dynamic programming over chain lengths.  The
reported value is a certified lower bound of the untruncated supremum
and is nondecreasing in the chain-length budget and in sample
refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ExtReal, as_vector

__all__ = [
    "GraphSample",
    "MonotoneReport",
    "CycleReport",
    "is_monotone",
    "is_cyclically_monotone",
    "rockafellar_potential",
    "rockafellar_dual_potential",
    "graph_transpose",
    "BudgetExceededError",
]

# relaxations (i, j, k) the max-plus sweep may perform before giving up
DEFAULT_CHAIN_BUDGET = 2_000_000_000


class BudgetExceededError(RuntimeError):
    """The cycle sweep would exceed its relaxation budget."""

    def __init__(self, msg: str, partial: "CycleReport | None" = None):
        super().__init__(msg)
        self.partial = partial


@dataclass(frozen=True, eq=False)
class GraphSample:
    """Couples ``(x_i, y_i)`` stored as two aligned arrays."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.atleast_2d(np.asarray(self.xs, dtype=float))
        ys = np.atleast_2d(np.asarray(self.ys, dtype=float))
        if xs.shape[0] != ys.shape[0]:
            raise ValueError("xs and ys must list the same number of couples")
        if xs.shape[0] == 0:
            raise ValueError("empty graph sample")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("graph couples must be finite")
        pairs = np.hstack([xs, ys])
        uniq = np.unique(pairs, axis=0)
        if uniq.shape[0] != pairs.shape[0]:
            raise ValueError("duplicate couples in graph sample")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_pairs(cls, pairs) -> "GraphSample":
        xs = [as_vector(x) for x, _ in pairs]
        ys = [as_vector(y) for _, y in pairs]
        return cls(np.array(xs), np.array(ys))

    @property
    def size(self) -> int:
        return self.xs.shape[0]

    @property
    def dim_x(self) -> int:
        return self.xs.shape[1]

    @property
    def dim_y(self) -> int:
        return self.ys.shape[1]

    def operator_image(self, x, tol: float = 0.0) -> np.ndarray:
        """``m(x) = {y : (x, y) in M}``; empty array if x is outside dom(M)."""
        xv = as_vector(x, dim=self.dim_x)
        hit = np.all(np.abs(self.xs - xv) <= tol, axis=1)
        return self.ys[hit]

    def dual_image(self, y, tol: float = 0.0) -> np.ndarray:
        """``m*(y) = {x : (x, y) in M}``."""
        yv = as_vector(y, dim=self.dim_y)
        hit = np.all(np.abs(self.ys - yv) <= tol, axis=1)
        return self.xs[hit]

    def domain(self) -> np.ndarray:
        return np.unique(self.xs, axis=0)

    def image(self) -> np.ndarray:
        return np.unique(self.ys, axis=0)

    def with_pair(self, x, y) -> "GraphSample":
        xv = as_vector(x, dim=self.dim_x)
        yv = as_vector(y, dim=self.dim_y)
        return GraphSample(np.vstack([self.xs, xv]), np.vstack([self.ys, yv]))


def graph_transpose(M: GraphSample) -> GraphSample:
    """Swap the roles of x and y in every couple."""
    return GraphSample(M.ys.copy(), M.xs.copy())


@dataclass(frozen=True)
class MonotoneReport:
    monotone: bool
    witness: tuple[int, int] | None
    worst: float

    def __bool__(self) -> bool:
        return self.monotone


def is_monotone(M: GraphSample, tol: float = 0.0) -> MonotoneReport:
    """Check ``<x_i - x_j, y_i - y_j> >= 0`` over all couple pairs."""
    P = M.xs @ M.ys.T
    d = np.diag(P)
    G = d[:, None] + d[None, :] - P - P.T  # <x_i - x_j, y_i - y_j>
    worst = float(np.min(G))
    if worst >= -tol:
        return MonotoneReport(True, None, worst)
    i, j = np.unravel_index(np.argmin(G), G.shape)
    return MonotoneReport(False, (int(i), int(j)), worst)


@dataclass(frozen=True)
class CycleReport:
    cyclically_monotone: bool
    max_cycle_value: float | None
    witness_cycle: tuple[int, ...] | None
    m_max: int
    tol: float

    def __bool__(self) -> bool:
        return self.cyclically_monotone


def _transition_matrix(M: GraphSample) -> np.ndarray:
    # W[i, j] = <x_j - x_i, y_i>; self-transitions are banned (-inf) since
    # they contribute exactly zero and only pad cycles.
    W = (M.xs @ M.ys.T).T - np.sum(M.xs * M.ys, axis=1)[:, None]
    np.fill_diagonal(W, -math.inf)
    return W


def _maxplus_step(A: np.ndarray, W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One max-plus product with argmax tracking: (A (*) W, argmax index)."""
    # stack over the middle index; memory m^2 per slice
    m = W.shape[0]
    best = np.full_like(A, -math.inf)
    arg = np.zeros(A.shape, dtype=np.int32)
    for k in range(m):
        cand = A[:, k, None] + W[k, None, :]
        upd = cand > best
        best = np.where(upd, cand, best)
        arg = np.where(upd, k, arg)
    return best, arg


def is_cyclically_monotone(M: GraphSample, m_max: int,
                           tol: float | None = None,
                           budget: int = DEFAULT_CHAIN_BUDGET) -> CycleReport:
    """Exact maximum cycle value over all cycles of at most ``m_max`` couples.

    ``tol`` defaults to ``1e-9 * (1 + max |<x_i, y_j>|)``.  Raises
    :class:`BudgetExceededError` (carrying the verdict at the deepest
    affordable length) if the sweep would exceed the relaxation budget.
    """
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    m = M.size
    if tol is None:
        tol = 1e-9 * (1.0 + float(np.max(np.abs(M.xs @ M.ys.T))))
    W = _transition_matrix(M)
    if m_max < 2 or m < 2:
        return CycleReport(True, None, None, m_max, tol)

    cost = (m_max - 1) * m ** 3
    depth_cap = m_max
    if cost > budget:
        depth_cap = max(2, 1 + budget // max(1, m ** 3))

    best_val = -math.inf
    best = None  # (length, start index)
    A = W.copy()
    args: list[np.ndarray] = []
    for L in range(2, depth_cap + 1):
        A, arg = _maxplus_step(A, W)
        args.append(arg)
        diag = np.diag(A)
        v = float(np.max(diag))
        if v > best_val:
            best_val = v
            best = (L, int(np.argmax(diag)))

    witness = None
    if best is not None and best_val > -math.inf:
        L, i0 = best
        witness = _backtrack_cycle(args, i0, L)

    verdict = best_val <= tol
    report = CycleReport(verdict, best_val if best_val > -math.inf else None,
                         witness, depth_cap, tol)
    if depth_cap < m_max:
        raise BudgetExceededError(
            f"cycle sweep truncated at length {depth_cap} of {m_max}", report)
    return report


def _backtrack_cycle(args: list[np.ndarray], i0: int, L: int) -> tuple[int, ...]:
    """Recover the maximizing cycle i0 -> ... -> i0 of length L."""
    # args[t] holds the argmax middle index for paths of length t + 2
    path_end = i0
    rev: list[int] = []
    for t in range(L - 2, -1, -1):
        k = int(args[t][i0, path_end])
        rev.append(k)
        path_end = k
    rev.reverse()
    return tuple([i0] + rev)


def _chain_values(M: GraphSample, x0, m_max: int) -> np.ndarray:
    """Best chain value from the base point to each terminal couple.

    ``S[j]`` maximizes ``sum <x_k - x_{k-1}, y_{k-1}>`` over chains
    ``(x_0, y_0) -> ... -> (x_m, y_m) = couple j`` with ``m <= m_max``,
    the base y_0 ranging over m(x0).
    """
    x0v = as_vector(x0, dim=M.dim_x)
    y0s = M.operator_image(x0v, tol=1e-12)
    if y0s.shape[0] == 0:
        raise ValueError("base point is not in dom(M)")
    W = (M.xs @ M.ys.T).T - np.sum(M.xs * M.ys, axis=1)[:, None]
    np.fill_diagonal(W, 0.0)
    # first hop from the base point, best over admissible y_0
    S = np.max((M.xs - x0v) @ y0s.T, axis=1)
    best = S.copy()
    for _ in range(m_max - 1):
        S = np.max(S[:, None] + W, axis=0)
        best = np.maximum(best, S)
    return best


def rockafellar_potential(M: GraphSample, x0, phi0: float, x, m_max: int) -> ExtReal:
    """Chain-supremum reconstruction of a potential whose subdifferential
    graph contains ``M``; a certified lower bound, nondecreasing in
    ``m_max``, normalized by the value ``phi0`` at the base point."""
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    xv = as_vector(x, dim=M.dim_x)
    S = _chain_values(M, x0, m_max)
    closing = np.sum((xv[None, :] - M.xs) * M.ys, axis=1)
    return ExtReal(float(np.max(S + closing)) + phi0)


def rockafellar_dual_potential(M: GraphSample, y0, psi0: float, y, m_max: int) -> ExtReal:
    """Same construction applied to the dual law (roles of x and y swapped)."""
    return rockafellar_potential(graph_transpose(M), y0, psi0, y, m_max)

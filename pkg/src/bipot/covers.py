"""Parametrized families of bipotentials covering a target graph.

A cover is a finite sample of a compact parameter space together with
one bipotential per sampled parameter.  The checks here probe the three
machine-testable cover properties: implicit convexity of the family in
each argument (an existential over the sampled parameters, so a failed
draw is reported as *unverified at this sampling*, never as a
disproof), the union of the member critical sets against the target
graph, and invariance of the pointwise infimum under reparametrization.
Compactness and the lower-semicontinuity conditions in the parameter
are not machine-checkable from samples; reports carry them as recorded
assumptions.

The pointwise infimum of the members is itself exposed as a bipotential
specification so the generic axiom checks apply to it unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bipotentials import BipotentialSpec, _as_points, _critical_mask
from .core import INF, ExtReal, as_vector
from .graphs import GraphSample
from .grids import Grid

__all__ = [
    "CoverSpec",
    "CoverInfBipotential",
    "inf_bipotential",
    "check_implicit_convexity",
    "ImplicitConvexityReport",
    "check_cover_union",
    "CoverUnionReport",
    "check_reparametrization_invariance",
    "ASSUMPTIONS_NOTE",
]

ASSUMPTIONS_NOTE = ("compactness of the parameter space and joint lower "
                    "semicontinuity in the parameter are assumed, not "
                    "verified: finite samples cannot decide them")


@dataclass(frozen=True, eq=False)
class CoverSpec:
    """Sampled parameter values with one bipotential member each.

    ``paired_values`` optionally vectorizes a member over paired point
    arrays; ``target_membership`` optionally decides exact membership in
    the target law (falling back to distance against the sampled graph).
    """

    parameters: tuple[float, ...]
    members: tuple[BipotentialSpec, ...]
    target_graph: GraphSample | None = None
    target_membership: object = None
    paired_values: object = None

    def __post_init__(self):
        if not self.parameters:
            raise ValueError("a cover needs at least one sampled parameter")
        if len(self.parameters) != len(self.members):
            raise ValueError("one member per sampled parameter")
        dims = {(m.dim_x, m.dim_y) for m in self.members}
        if len(dims) != 1:
            raise ValueError("members must share dimensions")

    @property
    def dim_x(self) -> int:
        return self.members[0].dim_x

    @property
    def dim_y(self) -> int:
        return self.members[0].dim_y

    def member(self, lam: float) -> BipotentialSpec:
        return self.members[self.parameters.index(lam)]

    def member_paired(self, idx: int, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Values of member ``idx`` at paired points, shape ``(m,)``."""
        if self.paired_values is not None:
            return np.asarray(
                self.paired_values(self.parameters[idx], X, Y), dtype=float)
        out = np.empty(X.shape[0])
        b = self.members[idx]
        for k in range(X.shape[0]):
            out[k] = b.value_matrix(X[k][None, :], Y[k][None, :])[0, 0]
        return out

    def value(self, idx: int, x, y) -> float:
        xv = as_vector(x, dim=self.dim_x)
        yv = as_vector(y, dim=self.dim_y)
        return float(self.member_paired(idx, xv[None, :], yv[None, :])[0])


def inf_paired_values(cover: CoverSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """``min over sampled parameters`` of the member values, paired."""
    out = np.full(X.shape[0], math.inf)
    for idx in range(len(cover.parameters)):
        out = np.minimum(out, cover.member_paired(idx, X, Y))
    return out


def inf_bipotential(cover: CoverSpec, x, y) -> ExtReal:
    """Pointwise minimum of the members; +inf when every member is +inf."""
    xv = as_vector(x, dim=cover.dim_x)
    yv = as_vector(y, dim=cover.dim_y)
    v = float(inf_paired_values(cover, xv[None, :], yv[None, :])[0])
    return INF if v == math.inf else ExtReal(v)


@dataclass(frozen=True, eq=False)
class CoverInfBipotential(BipotentialSpec):
    """The infimum of the cover members as a bipotential specification."""

    cover: CoverSpec

    kind = "cover_inf"

    @property
    def dim_x(self) -> int:
        return self.cover.dim_x

    @property
    def dim_y(self) -> int:
        return self.cover.dim_y

    def value_matrix(self, X, Y) -> np.ndarray:
        out = None
        for m in self.cover.members:
            V = m.value_matrix(X, Y)
            out = V if out is None else np.minimum(out, V)
        return out


# ---------------------------------------------------------------------------
# implicit convexity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ImplicitConvexityReport:
    which: str
    n_draws: int
    n_witnessed: int
    n_trivial: int
    unverified: list
    worst_margin: float

    @property
    def verified(self) -> bool:
        """All informative draws found a witnessing parameter.

        A ``False`` verdict certifies nothing beyond the sampling: the
        inequality is existential over the full parameter space and the
        witness may live between the samples.
        """
        return not self.unverified


def check_implicit_convexity(cover: CoverSpec, which: str,
                             draws=None, n_draws: int = 200,
                             probes_fixed=None, probes_z=None,
                             alphas=(0.0, 0.25, 0.5, 0.75, 1.0),
                             tol: float = 1e-9,
                             seed: int = 0) -> ImplicitConvexityReport:
    """Existential convexity of the family in one argument.

    For draws ``(lam1, z1), (lam2, z2), alpha`` and a fixed value of the
    other argument, search the sampled parameters for ``lam`` with
    ``f(lam, combo) <= alpha f(lam1, z1) + beta f(lam2, z2) + tol``.
    Draws with an infinite right-hand side are trivially witnessed and
    counted separately.
    """
    if which not in {"x", "y"}:
        raise ValueError("which must be 'x' or 'y'")
    rng = np.random.default_rng(seed)
    dim_z = cover.dim_x if which == "x" else cover.dim_y
    dim_f = cover.dim_y if which == "x" else cover.dim_x
    if probes_z is None:
        probes_z = Grid.uniform(2.0, 5, dim_z).nodes
    else:
        probes_z, _ = _as_points(probes_z, dim_z)
    if probes_fixed is None:
        probes_fixed = Grid.uniform(2.0, 3, dim_f).nodes
    else:
        probes_fixed, _ = _as_points(probes_fixed, dim_f)

    n_params = len(cover.parameters)

    def f_val(idx: int, fixed: np.ndarray, z: np.ndarray) -> float:
        if which == "x":
            return cover.value(idx, z, fixed)
        return cover.value(idx, fixed, z)

    if draws is None:
        draws = []
        for _ in range(n_draws):
            draws.append((
                int(rng.integers(n_params)),
                probes_z[int(rng.integers(probes_z.shape[0]))],
                int(rng.integers(n_params)),
                probes_z[int(rng.integers(probes_z.shape[0]))],
                float(alphas[int(rng.integers(len(alphas)))]),
                probes_fixed[int(rng.integers(probes_fixed.shape[0]))],
            ))

    n_trivial = 0
    n_witnessed = 0
    unverified = []
    worst = -math.inf
    for i1, z1, i2, z2, alpha, fixed in draws:
        beta = 1.0 - alpha
        v1 = f_val(i1, fixed, np.asarray(z1, dtype=float))
        v2 = f_val(i2, fixed, np.asarray(z2, dtype=float))
        if math.isinf(v1) or math.isinf(v2):
            n_trivial += 1
            continue
        rhs = alpha * v1 + beta * v2
        combo = alpha * np.asarray(z1, dtype=float) + beta * np.asarray(z2, dtype=float)
        margins = [f_val(k, fixed, combo) - rhs for k in range(n_params)]
        best = min(margins)
        worst = max(worst, best)
        if best <= tol * (1.0 + abs(rhs)):
            n_witnessed += 1
        else:
            unverified.append(((i1, z1, i2, z2, alpha, fixed), best))
    return ImplicitConvexityReport(which, len(draws), n_witnessed, n_trivial,
                                   unverified, worst if worst > -math.inf else 0.0)


# ---------------------------------------------------------------------------
# critical-set union
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoverUnionReport:
    target_covered: bool
    target_misses: list
    criticals_in_target: bool
    foreign_criticals: list
    n_member_criticals: int
    assumptions: str = ASSUMPTIONS_NOTE

    @property
    def verified(self) -> bool:
        return self.target_covered and self.criticals_in_target


def check_cover_union(cover: CoverSpec, probes_x=None, probes_y=None,
                      tol: float = 1e-9,
                      graph_tol: float = 1e-6) -> CoverUnionReport:
    """Both inclusions of ``target = union of member critical sets``.

    Every target couple must be critical for some member; every member
    critical point found on the probes must belong to the target, by the
    exact membership oracle when one is supplied and by distance to the
    sampled graph otherwise.
    """
    if cover.target_graph is None:
        raise ValueError("cover has no target graph")
    M = cover.target_graph

    misses = []
    for k in range(M.size):
        x, y = M.xs[k], M.ys[k]
        p = float(x @ y)
        ok = False
        for idx in range(len(cover.parameters)):
            v = cover.value(idx, x, y)
            if abs(v - p) <= tol * (1.0 + abs(p)):
                ok = True
                break
        if not ok:
            misses.append((x, y))

    foreign = []
    n_crit = 0
    if probes_x is not None and probes_y is not None:
        X, _ = _as_points(probes_x, cover.dim_x)
        Y, _ = _as_points(probes_y, cover.dim_y)
        for idx, b in enumerate(cover.members):
            B = b.value_matrix(X, Y)
            mask = _critical_mask(B, X @ Y.T, tol)
            for i, j in np.argwhere(mask):
                n_crit += 1
                x, y = X[i], Y[j]
                if cover.target_membership is not None:
                    inside = bool(cover.target_membership(x, y))
                else:
                    d = np.min(np.linalg.norm(M.xs - x, axis=1)
                               + np.linalg.norm(M.ys - y, axis=1))
                    inside = d <= graph_tol
                if not inside:
                    foreign.append((cover.parameters[idx], x, y))

    return CoverUnionReport(not misses, misses, not foreign, foreign, n_crit)


# ---------------------------------------------------------------------------
# reparametrization invariance
# ---------------------------------------------------------------------------

def check_reparametrization_invariance(cover: CoverSpec, permutation,
                                       probes_x, probes_y,
                                       tol: float = 1e-9) -> bool:
    """The infimum values and the union of critical sets are unchanged,
    exactly, under any bijective relabeling of the sampled parameters."""
    perm = list(permutation)
    n = len(cover.parameters)
    if sorted(perm) != list(range(n)):
        raise ValueError("permutation must be a bijection of the sample indices")
    reordered = CoverSpec(
        tuple(cover.parameters[i] for i in perm),
        tuple(cover.members[i] for i in perm),
        cover.target_graph, cover.target_membership, cover.paired_values)

    X, _ = _as_points(probes_x, cover.dim_x)
    Y, _ = _as_points(probes_y, cover.dim_y)
    if X.shape[0] != Y.shape[0]:
        raise ValueError("reparametrization probes are paired")
    v0 = inf_paired_values(cover, X, Y)
    v1 = inf_paired_values(reordered, X, Y)
    same_inf = np.array_equal(v0, v1)

    P = np.sum(X * Y, axis=1)
    def union_mask(c: CoverSpec) -> np.ndarray:
        m = np.zeros(X.shape[0], dtype=bool)
        for idx in range(n):
            v = c.member_paired(idx, X, Y)
            m |= np.abs(v - P) <= tol * (1.0 + np.abs(P))
        return m

    same_union = np.array_equal(union_mask(cover), union_mask(reordered))
    return bool(same_inf and same_union)

"""Bipotential specifications and their verification.

A bipotential is a two-variable extended-real function, convex and lsc
in each argument separately, that dominates the duality pairing and for
which the two subdifferential inclusions and the equality
``b(x, y) = <x, y>`` are equivalent at every point.  A *strong*
bipotential additionally has per-slice infima of ``b - <.,.>`` equal to
0 or +inf.

The checks here are grid verdicts: they certify the axioms on the probed
points and report witnesses on failure.  Subdifferential inclusions are
tested through grid minimality of ``z -> b(z, y) - <z, y>``; a slice
whose grid minimum sits only on the grid boundary is inconclusive (the
true infimum may escape the truncation box) and is reported separately
instead of being classified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convex import (
    ConjugateUnavailable,
    ConvexFunction,
    MaxOf,
    SampledFunction,
    Scaled,
    Sum,
    closed_form_conjugate,
    convex_combination,
    inf_convolution,
    scaled_function,
    subdifferential,
    SubgradientEstimate,
    _pts,
    _sweep_values,
)
from .grids import Grid

__all__ = [
    "BipotentialSpec",
    "Separable",
    "MaxOfTwo",
    "ClosedFormBipotential",
    "nonstrong_example",
    "eval_bipotential",
    "critical_set",
    "CriticalSetReport",
    "check_axioms",
    "AxiomReport",
    "check_strong",
    "StrongReport",
    "SliceClass",
    "check_theorem31",
    "Theorem31Report",
    "minimax_gap_identity",
    "MinimaxReport",
    "check_corollary33",
    "Corollary33Report",
    "CorollaryHypothesisError",
    "MATRIX_ENTRY_CAP",
]

from .core import INF, ExtReal, as_vector

# largest b-matrix (probes_x times probes_y) built in one sweep
MATRIX_ENTRY_CAP = 30_000_000


class CorollaryHypothesisError(RuntimeError):
    """The strong-bipotential hypothesis of the corollary was not verified."""


def _as_points(probes, dim: int) -> tuple[np.ndarray, Grid | None]:
    if isinstance(probes, Grid):
        return probes.nodes, probes
    return _pts(probes, dim), None


# ---------------------------------------------------------------------------
# specifications
# ---------------------------------------------------------------------------

class BipotentialSpec:
    """Evaluable candidate ``b(x, y)``; subclasses tag their construction."""

    kind: str
    dim_x: int
    dim_y: int

    def value_matrix(self, X, Y) -> np.ndarray:
        """Values on the product of point lists, shape ``(mx, my)``."""
        raise NotImplementedError

    def __call__(self, x, y) -> ExtReal:
        return eval_bipotential(self, x, y)


@dataclass(frozen=True, eq=False)
class Separable(BipotentialSpec):
    """``b(x, y) = phi(x) + phi*(y)`` with the conjugate exact.

    ``phi_star`` defaults to the closed-form conjugate table; a numeric
    (sampled) conjugate may be supplied explicitly when no rule exists.
    """

    phi: ConvexFunction
    phi_star: ConvexFunction = None

    kind = "separable"

    def __post_init__(self):
        if self.phi_star is None:
            object.__setattr__(self, "phi_star", closed_form_conjugate(self.phi))

    @property
    def dim_x(self) -> int:
        return self.phi.dim

    @property
    def dim_y(self) -> int:
        return self.phi_star.dim

    def value_matrix(self, X, Y) -> np.ndarray:
        fx = _sweep_values(self.phi, _pts(X, self.dim_x))
        gy = _sweep_values(self.phi_star, _pts(Y, self.dim_y))
        return fx[:, None] + gy[None, :]


@dataclass(frozen=True, eq=False)
class MaxOfTwo(BipotentialSpec):
    b1: BipotentialSpec
    b2: BipotentialSpec

    kind = "max_of_two"

    def __post_init__(self):
        if (self.b1.dim_x, self.b1.dim_y) != (self.b2.dim_x, self.b2.dim_y):
            raise ValueError("branch dimensions differ")

    @property
    def dim_x(self) -> int:
        return self.b1.dim_x

    @property
    def dim_y(self) -> int:
        return self.b1.dim_y

    def value_matrix(self, X, Y) -> np.ndarray:
        return np.maximum(self.b1.value_matrix(X, Y), self.b2.value_matrix(X, Y))


@dataclass(frozen=True, eq=False)
class ClosedFormBipotential(BipotentialSpec):
    """A named closed-form expression; ``matrix_fn`` vectorizes over products."""

    fn: callable
    dim_x: int
    dim_y: int
    name: str = "anonymous"
    matrix_fn: callable = None

    kind = "closed_form"

    def value_matrix(self, X, Y) -> np.ndarray:
        Xp, Yp = _pts(X, self.dim_x), _pts(Y, self.dim_y)
        if self.matrix_fn is not None:
            return np.asarray(self.matrix_fn(Xp, Yp), dtype=float)
        out = np.empty((Xp.shape[0], Yp.shape[0]))
        for i, x in enumerate(Xp):
            for j, y in enumerate(Yp):
                out[i, j] = self.fn(x, y)
        return out


def nonstrong_example() -> ClosedFormBipotential:
    """``b(x, y) = |x| (e^{-y} + 1) + x y`` on R x R.

    A bipotential whose critical set is ``{0} x R`` and which violates
    the strong condition in the second slot: the slice infimum over y
    equals ``|x|``, a finite positive value, for every ``x != 0``.
    """

    def matrix(X, Y):
        x = X[:, 0]
        y = Y[:, 0]
        return np.abs(x)[:, None] * (np.exp(-y)[None, :] + 1.0) + x[:, None] * y[None, :]

    return ClosedFormBipotential(
        fn=lambda x, y: abs(x[0]) * (math.exp(-y[0]) + 1.0) + x[0] * y[0],
        dim_x=1, dim_y=1, name="nonstrong_abs_exp", matrix_fn=matrix)


def eval_bipotential(b: BipotentialSpec, x, y) -> ExtReal:
    xv = as_vector(x, dim=b.dim_x)
    yv = as_vector(y, dim=b.dim_y)
    v = float(b.value_matrix(xv[None, :], yv[None, :])[0, 0])
    return INF if v == math.inf else ExtReal(v)


# ---------------------------------------------------------------------------
# shared sweep helpers
# ---------------------------------------------------------------------------

def _product_arrays(b: BipotentialSpec, probes_x, probes_y):
    X, gx = _as_points(probes_x, b.dim_x)
    Y, gy = _as_points(probes_y, b.dim_y)
    if X.shape[0] * Y.shape[0] > MATRIX_ENTRY_CAP:
        raise ValueError("probe product too large; use smaller grids")
    if X.shape[1] != Y.shape[1]:
        raise ValueError("pairing requires equal dimensions")
    B = b.value_matrix(X, Y)
    P = X @ Y.T
    return X, Y, gx, gy, B, P


def _critical_mask(B: np.ndarray, P: np.ndarray, tol: float) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        return np.abs(B - P) <= tol * (1.0 + np.abs(P))


@dataclass(frozen=True)
class CriticalSetReport:
    """Grid pairs where ``b`` meets the pairing, i.e. the sampled law."""

    points: list
    indices: np.ndarray
    intersection_consistent: bool | None = None

    def __len__(self) -> int:
        return len(self.points)


def critical_set(b: BipotentialSpec, probes_x, probes_y,
                 tol: float = 1e-9) -> CriticalSetReport:
    """All probe pairs with ``|b - <x,y>| <= tol (1 + |<x,y>|)``.

    For a max of two specifications the report also states whether the
    critical set equals the intersection of the branch critical sets,
    pair for pair on the shared probes.
    """
    X, Y, _, _, B, P = _product_arrays(b, probes_x, probes_y)
    mask = _critical_mask(B, P, tol)
    idx = np.argwhere(mask)
    points = [(X[i], Y[j]) for i, j in idx]
    consistent = None
    if isinstance(b, MaxOfTwo):
        m1 = _critical_mask(b.b1.value_matrix(X, Y), P, tol)
        m2 = _critical_mask(b.b2.value_matrix(X, Y), P, tol)
        consistent = bool(np.array_equal(mask, m1 & m2))
    return CriticalSetReport(points, idx, consistent)


# ---------------------------------------------------------------------------
# axioms (definition of a bipotential)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AxiomReport:
    convex_in_x: bool
    convex_in_y: bool
    worst_convexity_violation: float
    fenchel_gap_min: ExtReal
    equivalence_failures: list
    critical_points: list
    inconclusive_pairs: int
    tol: float

    @property
    def passed(self) -> bool:
        gap_ok = self.fenchel_gap_min.is_inf or self.fenchel_gap_min.value >= -self.tol
        return (self.convex_in_x and self.convex_in_y and gap_ok
                and not self.equivalence_failures)


def _slice_convexity(B: np.ndarray, grid: Grid, along_rows: bool,
                     tol: float) -> tuple[bool, float]:
    """Chord convexity of every slice along the grid lines of one argument."""
    V = B if along_rows else B.T  # rows indexed by the grid argument
    other = V.shape[1]
    field_shape = grid.shape + (other,)
    F = V.reshape(field_shape)
    worst = -math.inf
    ok = True
    for axis, nodes in enumerate(grid.axes):
        A = np.moveaxis(F, axis, -2)
        a, mid, c = A[..., :-2, :], A[..., 1:-1, :], A[..., 2:, :]
        x0, x1, x2 = nodes[:-2, None], nodes[1:-1, None], nodes[2:, None]
        wl = (x2 - x1) / (x2 - x0)
        wr = (x1 - x0) / (x2 - x0)
        ends = np.isfinite(a) & np.isfinite(c)
        if np.any(ends & np.isinf(mid)):
            return False, math.inf
        with np.errstate(invalid="ignore"):
            chord = wl * np.where(ends, a, 0.0) + wr * np.where(ends, c, 0.0)
            viol = np.where(ends & np.isfinite(mid), mid - chord, -np.inf)
        if viol.size:
            worst = max(worst, float(np.max(viol)))
    finite = B[np.isfinite(B)]
    scale = tol * (1.0 + (float(np.max(np.abs(finite))) if finite.size else 1.0))
    if worst > scale:
        ok = False
    return ok, worst if worst > -math.inf else 0.0


def _min_and_conclusive(col: np.ndarray, interior: np.ndarray | None,
                        tol_entry: np.ndarray) -> tuple[float, np.ndarray, bool]:
    """Column minimum, grid-minimizer mask, and conclusiveness.

    A slice whose near-minimal set touches the grid boundary is
    inconclusive: the true infimum may sit beyond the truncation box (or
    never be attained at all), so grid minimality there proves nothing.
    An all-infinite slice is conclusive with an empty minimizer set.
    """
    m = float(np.min(col))
    if m == math.inf:
        return m, np.zeros(col.shape, dtype=bool), True
    at_min = col <= m + tol_entry
    conclusive = True if interior is None else bool(np.all(interior[at_min]))
    return m, at_min, conclusive


def check_axioms(b: BipotentialSpec, grid_x: Grid, grid_y: Grid,
                 tol: float = 1e-9) -> AxiomReport:
    """Verdicts for the three bipotential axioms on the product grid.

    (a) per-argument chord convexity of every slice, (b) the minimum
    Fenchel gap ``b - <.,.>``, and (c) agreement, at every conclusive
    pair, between the two grid-minimality inclusions and the equality
    ``b = <x, y>``.
    """
    if not isinstance(grid_x, Grid) or not isinstance(grid_y, Grid):
        raise TypeError("check_axioms sweeps product grids")
    X, Y, gx, gy, B, P = _product_arrays(b, grid_x, grid_y)
    tol_P = tol * (1.0 + np.abs(P))

    ok_x, worst_x = _slice_convexity(B, grid_x, True, tol)
    ok_y, worst_y = _slice_convexity(B, grid_y, False, tol)

    with np.errstate(invalid="ignore"):
        G = B - P
    gap_min = float(np.min(G))
    gap = INF if gap_min == math.inf else ExtReal(gap_min)

    eq = _critical_mask(B, P, tol)
    finite = np.isfinite(B)
    ix = grid_x.interior_mask()
    iy = grid_y.interior_mask()

    d1 = np.zeros_like(eq)
    reliable1 = np.ones_like(eq)
    for j in range(Y.shape[0]):
        _, at_min, concl = _min_and_conclusive(G[:, j], ix, tol_P[:, j])
        d1[:, j] = at_min & finite[:, j]
        if not concl:
            reliable1[:, j] = False
    d2 = np.zeros_like(eq)
    reliable2 = np.ones_like(eq)
    for i in range(X.shape[0]):
        _, at_min, concl = _min_and_conclusive(G[i, :], iy, tol_P[i, :])
        d2[i, :] = at_min & finite[i, :]
        if not concl:
            reliable2[i, :] = False

    bad = (reliable1 & (d1 != eq)) | (reliable2 & (d2 != eq))
    failures = [(X[i], Y[j], bool(d1[i, j]), bool(d2[i, j]), bool(eq[i, j]))
                for i, j in np.argwhere(bad)]
    criticals = [(X[i], Y[j]) for i, j in np.argwhere(eq)]
    inconclusive = int(np.sum(~(reliable1 & reliable2)))

    return AxiomReport(ok_x, ok_y, max(worst_x, worst_y), gap,
                       failures, criticals, inconclusive, tol)


# ---------------------------------------------------------------------------
# strong conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SliceClass:
    """Classification of one slice infimum of ``b - <.,.>``."""

    kind: str  # "zero" | "inf" | "violation"
    inf_value: float
    witness_index: int | None = None


@dataclass(frozen=True)
class StrongReport:
    b1s: list
    b2s: list
    violations: list
    used_threshold: bool
    tol: float

    @property
    def strong(self) -> bool:
        return not self.violations


def _classify_slices(G: np.ndarray, axis: int, tol: float,
                     inf_threshold: float) -> tuple[list, list, bool]:
    """Classify the infimum of every slice of ``G = b - pairing``."""
    out: list[SliceClass] = []
    violations: list[tuple[int, SliceClass]] = []
    used_threshold = False
    n_slices = G.shape[1 - axis]
    for s in range(n_slices):
        col = G[:, s] if axis == 0 else G[s, :]
        m = float(np.min(col))
        if m == math.inf:
            out.append(SliceClass("inf", math.inf))
        elif m <= tol:
            out.append(SliceClass("zero", m, int(np.argmin(col))))
        elif m > inf_threshold:
            used_threshold = True
            out.append(SliceClass("inf", m, int(np.argmin(col))))
        else:
            sc = SliceClass("violation", m, int(np.argmin(col)))
            out.append(sc)
            violations.append((s, sc))
    return out, violations, used_threshold


def check_strong(b: BipotentialSpec, probes_x, probes_y, tol: float = 1e-9,
                 inf_threshold: float = 1e6) -> StrongReport:
    """Classify every slice infimum of ``b - <.,.>`` as 0, +inf, or a
    violation (a finite positive infimum).

    +inf is detected by exact propagation from the indicator atoms; the
    magnitude threshold only kicks in for sampled data, and its use is
    flagged in the report.
    """
    X, Y, _, _, B, P = _product_arrays(b, probes_x, probes_y)
    with np.errstate(invalid="ignore"):
        G = B - P
    b1s, v1, t1 = _classify_slices(G, 0, tol, inf_threshold)
    b2s, v2, t2 = _classify_slices(G, 1, tol, inf_threshold)
    violations = [("B1S", j, Y[j], sc.inf_value, X[sc.witness_index])
                  for j, sc in v1]
    violations += [("B2S", i, X[i], sc.inf_value, Y[sc.witness_index])
                   for i, sc in v2]
    return StrongReport(b1s, b2s, violations, t1 or t2, tol)


# ---------------------------------------------------------------------------
# the max-of-two criterion
# ---------------------------------------------------------------------------

def _conjugate_values(phi: ConvexFunction, Y: np.ndarray,
                      Xnodes: np.ndarray) -> tuple[np.ndarray, bool]:
    """Values of ``phi*`` at probe points: exact table when available,
    otherwise the grid sup over ``Xnodes`` (flagged approximate)."""
    try:
        star = closed_form_conjugate(phi)
        return _sweep_values(star, Y), True
    except ConjugateUnavailable:
        fv = _sweep_values(phi, Xnodes)
        finite = np.isfinite(fv)
        vals = np.max(Y @ Xnodes[finite].T - fv[finite][None, :], axis=1)
        return vals, False


def _grid_conjugate_at(values_primal: np.ndarray, Xnodes: np.ndarray,
                       Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Grid sup of ``<y, x> - f(x)`` at each probe, with argmax indices
    (into the full node list) for truncation diagnostics."""
    finite = np.isfinite(values_primal)
    if not finite.any():
        return np.full(Y.shape[0], math.inf), np.full(Y.shape[0], -1, dtype=int)
    idx_map = np.nonzero(finite)[0]
    scores = Y @ Xnodes[finite].T - values_primal[finite][None, :]
    arg = np.argmax(scores, axis=1)
    return scores[np.arange(Y.shape[0]), arg], idx_map[arg]


@dataclass(frozen=True)
class ConditionSweep:
    holds: bool
    worst_gap: float
    witness: tuple | None
    tested: int
    skipped_boundary: int


@dataclass(frozen=True)
class Theorem31Report:
    ii_prime: ConditionSweep
    ii_second: ConditionSweep
    strong: StrongReport
    consistent: bool
    exact_conjugates: bool


def _combination_values(f1v: np.ndarray, f2v: np.ndarray, lam: float) -> np.ndarray:
    if lam == 1.0:
        return f1v
    if lam == 0.0:
        return f2v
    with np.errstate(invalid="ignore"):
        combo = lam * f1v + (1.0 - lam) * f2v
    return np.where(np.isinf(f1v) | np.isinf(f2v), math.inf, combo)


def _sweep_condition(phi1: ConvexFunction, phi2: ConvexFunction,
                     lambdas: np.ndarray, primal_nodes: np.ndarray,
                     primal_interior: np.ndarray | None,
                     duals: np.ndarray, c1: np.ndarray, c2: np.ndarray,
                     tol: float) -> ConditionSweep:
    """Common sweep for the two convex-combination conjugate identities:
    compare the grid conjugate of each weighted combination against the
    weighted sum of conjugates over the admissible dual probes.

    A probe whose inner sup peaks on the primal-grid boundary is skipped
    as truncation-inconclusive rather than counted as a gap.
    """
    in_dom = np.isfinite(c1) & np.isfinite(c2)
    Ysel = duals[in_dom]
    if Ysel.shape[0] == 0:
        return ConditionSweep(True, 0.0, None, 0, 0)
    f1v = _sweep_values(phi1, primal_nodes)
    f2v = _sweep_values(phi2, primal_nodes)
    worst = 0.0
    witness = None
    tested = 0
    skipped = 0
    for lam in lambdas:
        combo = _combination_values(f1v, f2v, lam)
        lhs, arg = _grid_conjugate_at(combo, primal_nodes, Ysel)
        rhs = lam * c1[in_dom] + (1.0 - lam) * c2[in_dom]
        gaps = np.abs(lhs - rhs)
        if primal_interior is not None:
            ok = arg >= 0
            trusted = np.zeros(gaps.shape, dtype=bool)
            trusted[ok] = primal_interior[arg[ok]]
            # gaps within tolerance are conclusive wherever they peak
            trusted |= gaps <= tol
            skipped += int(np.sum(~trusted))
            gaps = gaps[trusted]
        tested += int(gaps.size)
        if gaps.size:
            g = float(np.max(gaps))
            if g > worst:
                worst = g
                witness = (float(lam), Ysel[trusted][int(np.argmax(gaps))] if
                           primal_interior is not None else
                           Ysel[int(np.argmax(gaps))], g)
    return ConditionSweep(worst <= tol, worst, witness if worst > tol else None,
                          tested, skipped)


def check_theorem31(phi1: ConvexFunction, phi2: ConvexFunction,
                    lambda_grid=None, grid_x: Grid | np.ndarray = None,
                    grid_y: Grid | np.ndarray = None,
                    tol: float = 0.01) -> Theorem31Report:
    """Numerical audit of the strong-maximum criterion.

    Checks the two conjugate identities for convex combinations over
    the admissible dual probes and all weights, runs the strong check on
    ``max(b1, b2)``, and asserts that the two verdicts coincide, which
    is the content of the criterion.
    """
    dim = phi1.dim
    if phi2.dim != dim:
        raise ValueError("dimension mismatch")
    if lambda_grid is None:
        lambda_grid = np.linspace(0.0, 1.0, 21)
    lambdas = np.asarray(lambda_grid, dtype=float)
    if grid_x is None:
        grid_x = Grid.uniform(dim=dim)
    if grid_y is None:
        grid_y = Grid.uniform(dim=dim)
    Xn, gxo = _as_points(grid_x, dim)
    Yn, gyo = _as_points(grid_y, dim)
    ix = gxo.interior_mask() if gxo is not None else None
    iy = gyo.interior_mask() if gyo is not None else None

    c1, e1 = _conjugate_values(phi1, Yn, Xn)
    c2, e2 = _conjugate_values(phi2, Yn, Xn)
    ii_prime = _sweep_condition(phi1, phi2, lambdas, Xn, ix, Yn, c1, c2, tol)

    # symmetric condition: the conjugates swap roles, probed at primal points
    try:
        s1: ConvexFunction = closed_form_conjugate(phi1)
        s2: ConvexFunction = closed_form_conjugate(phi2)
        exact = True
    except ConjugateUnavailable:
        if gyo is None:
            raise ValueError("numeric conjugates need grid_y to be a Grid")
        s1 = SampledFunction(gyo, _grid_conjugate_at(_sweep_values(phi1, Xn), Xn, Yn)[0])
        s2 = SampledFunction(gyo, _grid_conjugate_at(_sweep_values(phi2, Xn), Xn, Yn)[0])
        exact = False
    f1v = _sweep_values(phi1, Xn)
    f2v = _sweep_values(phi2, Xn)
    ii_second = _sweep_condition(s1, s2, lambdas, Yn, iy, Xn, f1v, f2v, tol)

    b = MaxOfTwo(Separable(phi1, s1), Separable(phi2, s2))
    strong = check_strong(b, Xn, Yn, tol=tol)
    consistent = strong.strong == (ii_prime.holds and ii_second.holds)
    return Theorem31Report(ii_prime, ii_second, strong, consistent,
                           e1 and e2 and exact)


# ---------------------------------------------------------------------------
# minimax identity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinimaxReport:
    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)


def minimax_gap_identity(phi1: ConvexFunction, phi2: ConvexFunction, y,
                         lambda_grid=None, grid_x: Grid | np.ndarray = None
                         ) -> MinimaxReport:
    """Both sides of the exchanged sup/min over the shared domain.

    ``lhs`` maximizes ``<z, y> - max(b1, b2)(z, y)`` over the common
    effective domain; ``rhs`` minimizes the conjugate defect of the
    weighted combinations.  The two agree for every admissible ``y``.
    """
    dim = phi1.dim
    if lambda_grid is None:
        lambda_grid = np.linspace(0.0, 1.0, 21)
    if grid_x is None:
        grid_x = Grid.uniform(dim=dim)
    Xn, _ = _as_points(grid_x, dim)
    yv = as_vector(y, dim=dim)

    f1v = _sweep_values(phi1, Xn)
    f2v = _sweep_values(phi2, Xn)
    C = np.isfinite(f1v) & np.isfinite(f2v)
    if not C.any():
        raise ValueError("common effective domain is empty on the grid")
    c1, _ = _conjugate_values(phi1, yv[None, :], Xn)
    c2, _ = _conjugate_values(phi2, yv[None, :], Xn)
    if not (np.isfinite(c1[0]) and np.isfinite(c2[0])):
        raise ValueError("y must lie in both conjugate domains")

    pz = Xn[C] @ yv
    bvals = np.maximum(f1v[C] + c1[0], f2v[C] + c2[0])
    lhs = float(np.max(pz - bvals))

    rhs = math.inf
    for lam in np.asarray(lambda_grid, dtype=float):
        if lam == 1.0:
            combo = f1v
        elif lam == 0.0:
            combo = f2v
        else:
            with np.errstate(invalid="ignore"):
                combo = lam * f1v + (1.0 - lam) * f2v
                combo = np.where(np.isinf(f1v) | np.isinf(f2v), math.inf, combo)
        star = float(np.max(Xn[np.isfinite(combo)] @ yv
                            - combo[np.isfinite(combo)]))
        rhs = min(rhs, star - lam * float(c1[0]) - (1.0 - lam) * float(c2[0]))
    return MinimaxReport(lhs, rhs)


# ---------------------------------------------------------------------------
# inf-convolution corollary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Corollary33Report:
    lhs: SubgradientEstimate
    rhs: SubgradientEstimate
    hausdorff: float
    equal: bool


def check_corollary33(phi1: ConvexFunction, phi2: ConvexFunction, lam: float,
                      x: float, tol: float = 0.02, grid: Grid | None = None,
                      strong_verified: bool = False) -> Corollary33Report:
    """Compare the subdifferential of the inf-convolution of the epigraph
    scalings with the intersection of the branch subdifferentials (1-D).

    The hypothesis (the maximum of the two separable bipotentials is a
    strong bipotential) is verified on the grid unless the caller vouches
    for it.
    """
    if phi1.dim != 1 or phi2.dim != 1:
        raise ValueError("the corollary check is one-dimensional")
    if not 0.0 < lam < 1.0:
        raise ValueError("weight must lie strictly inside (0, 1)")
    if grid is None:
        grid = Grid.uniform(dim=1)
    if not strong_verified:
        rep = check_theorem31(phi1, phi2, np.linspace(0, 1, 11), grid, grid,
                              tol=0.05)
        if not rep.strong.strong:
            raise CorollaryHypothesisError(
                "corollary hypothesis unmet: max(b1, b2) is not strong on the grid")

    f1 = scaled_function(lam, phi1, 1)
    f2 = scaled_function(lam, phi2, 2)
    h = inf_convolution(f1, f2, grid)
    lhs = subdifferential(h, x, probe_grid=grid)

    s1 = subdifferential(phi1, x, probe_grid=grid)
    s2 = subdifferential(phi2, x, probe_grid=grid)
    rhs = SubgradientEstimate(1, lo=max(s1.lo, s2.lo), hi=min(s1.hi, s2.hi),
                              exact=s1.exact and s2.exact)
    hd = lhs.hausdorff_1d(rhs)
    return Corollary33Report(lhs, rhs, hd, hd <= tol)

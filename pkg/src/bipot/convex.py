"""Convex lsc functions on R^n (n <= 3) and their calculus.

Two representations coexist:

* **closed-form atom trees** built from a small library of convex atoms
  (affine, quadratic, powers of the absolute value, scaled norms,
  indicators of convex sets, sums, pointwise maxima and epigraph
  scalings), all evaluated exactly, and

* **grid samples** of extended-real values on an axis-aligned grid,
  evaluated by multilinear interpolation among finite-valued cells.

On top of these the module provides the Fenchel conjugate (closed-form
table where a rule exists, grid sup otherwise, plus a linear-time 1-D
transform), the inf-convolution, subdifferential estimates with a
probe-validated subgradient inequality, convex combinations and the
epigraph scaling ``lam * f(x / lam)``.

Numeric results are exact for the function truncated to the grid box;
the truncation is part of the documented semantics, not an error term
we hide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import INF, ExtReal, as_vector
from .grids import DEFAULT_NODES, DEFAULT_RADIUS, Grid

__all__ = [
    "ConvexFunction",
    "Affine",
    "Quadratic",
    "PowerAbs",
    "ScaledNorm",
    "IndicatorOf",
    "Sum",
    "MaxOf",
    "Scaled",
    "PreScaled",
    "SampledFunction",
    "SetAtom",
    "Singleton",
    "Box",
    "Disc",
    "CoulombCone",
    "DualCoulombCone",
    "halfspace_nonpositive",
    "evaluate",
    "closed_form_conjugate",
    "fenchel_conjugate",
    "fast_conjugate_1d",
    "inf_convolution",
    "subdifferential",
    "SubgradientEstimate",
    "convex_combination",
    "scaled_function",
    "is_convex_on_grid",
    "ConvexityReport",
    "DomainError",
    "EmptyDomainError",
    "ConjugateUnavailable",
]


class DomainError(ValueError):
    """Query outside the effective domain or the sampled hull."""


class EmptyDomainError(ValueError):
    """The function is +inf on every probed point (empty epigraph at desk scale)."""


class ConjugateUnavailable(ValueError):
    """No closed-form conjugate rule applies; use the numeric transform."""


def _pts(X, dim: int) -> np.ndarray:
    """Coerce to an ``(m, dim)`` float array of query points."""
    A = np.asarray(X, dtype=float)
    if A.ndim == 1:
        if dim == 1:
            A = A[:, None]
        else:
            A = A[None, :]
    if A.ndim != 2 or A.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {A.shape}")
    return A


# ---------------------------------------------------------------------------
# convex sets
# ---------------------------------------------------------------------------

class SetAtom:
    """A closed convex subset of R^dim with an exact membership test."""

    dim: int

    def contains(self, X) -> np.ndarray:
        raise NotImplementedError

    def support_coords(self) -> frozenset[int]:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Singleton(SetAtom):
    point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", as_vector(self.point))

    @property
    def dim(self) -> int:
        return self.point.size

    def contains(self, X) -> np.ndarray:
        P = _pts(X, self.dim)
        return np.all(P == self.point, axis=1)

    def support_coords(self) -> frozenset[int]:
        return frozenset(range(self.dim))


@dataclass(frozen=True, eq=False)
class Box(SetAtom):
    """Product of closed intervals; bounds may be ``-inf`` / ``+inf``."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1 or not 1 <= lo.size <= 3:
            raise ValueError("box bounds must be 1-D of matching size <= 3")
        if np.any(lo > hi):
            raise ValueError("box bounds must satisfy lo <= hi")
        if np.any(lo == math.inf) or np.any(hi == -math.inf):
            raise ValueError("degenerate infinite bound")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.size

    def contains(self, X) -> np.ndarray:
        P = _pts(X, self.dim)
        return np.all((P >= self.lo) & (P <= self.hi), axis=1)

    def support_coords(self) -> frozenset[int]:
        return frozenset(
            i for i in range(self.dim)
            if self.lo[i] > -math.inf or self.hi[i] < math.inf
        )


def halfspace_nonpositive(dim: int, coord: int) -> Box:
    """``{x : x[coord] <= 0}`` as a box with one finite bound."""
    lo = np.full(dim, -math.inf)
    hi = np.full(dim, math.inf)
    hi[coord] = 0.0
    return Box(lo, hi)


@dataclass(frozen=True, eq=False)
class Disc(SetAtom):
    """``{x : ||x_S|| <= radius}`` over the coordinate subset S; free elsewhere."""

    radius: float
    coords: tuple[int, ...]
    dim: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("disc radius must be nonnegative")
        coords = tuple(sorted(set(int(c) for c in self.coords)))
        if not coords or any(c < 0 or c >= self.dim for c in coords):
            raise ValueError("disc coordinates out of range")
        object.__setattr__(self, "coords", coords)

    def contains(self, X) -> np.ndarray:
        P = _pts(X, self.dim)
        return np.linalg.norm(P[:, self.coords], axis=1) <= self.radius

    def support_coords(self) -> frozenset[int]:
        return frozenset(self.coords)


@dataclass(frozen=True, eq=False)
class CoulombCone(SetAtom):
    """``{y in R^3 : ||y_t|| <= mu * y_n}`` with ``y = (y_n, y_t)``."""

    mu: float
    dim: int = 3

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("friction coefficient must be positive")
        if self.dim != 3:
            raise ValueError("Coulomb cones live in R^3")

    def contains(self, X) -> np.ndarray:
        P = _pts(X, 3)
        return np.linalg.norm(P[:, 1:], axis=1) <= self.mu * P[:, 0]

    def support_coords(self) -> frozenset[int]:
        return frozenset({0, 1, 2})


@dataclass(frozen=True, eq=False)
class DualCoulombCone(SetAtom):
    """``{x in R^3 : mu * ||x_t|| + x_n <= 0}``, the polar of the Coulomb cone."""

    mu: float
    dim: int = 3

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("friction coefficient must be positive")
        if self.dim != 3:
            raise ValueError("Coulomb cones live in R^3")

    def contains(self, X) -> np.ndarray:
        P = _pts(X, 3)
        return self.mu * np.linalg.norm(P[:, 1:], axis=1) + P[:, 0] <= 0.0

    def support_coords(self) -> frozenset[int]:
        return frozenset({0, 1, 2})


# ---------------------------------------------------------------------------
# convex functions
# ---------------------------------------------------------------------------

class ConvexFunction:
    """Base for all function representations.

    ``values`` is the vectorized evaluator: it maps an ``(m, dim)`` array
    of points to an ``(m,)`` float array where ``np.inf`` stands for the
    extended value.  ``-inf`` and NaN never appear.
    """

    dim: int

    def values(self, X) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> ExtReal:
        return evaluate(self, x)

    # closed-form subdifferential hooks; None means "no exact rule"
    def subgrad_interval(self, x: float) -> tuple[float, float] | None:
        return None

    def gradient(self, x: np.ndarray) -> np.ndarray | None:
        return None


@dataclass(frozen=True, eq=False)
class Affine(ConvexFunction):
    """``x -> <a, x> + c``."""

    a: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", as_vector(self.a))
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return self.a.size

    def values(self, X) -> np.ndarray:
        return _pts(X, self.dim) @ self.a + self.c

    def subgrad_interval(self, x):
        return (self.a[0], self.a[0])

    def gradient(self, x):
        return self.a.copy()


@dataclass(frozen=True, eq=False)
class Quadratic(ConvexFunction):
    """``x -> x^T Q x / 2`` with Q symmetric positive semidefinite."""

    Q: np.ndarray

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        if Q.shape[0] != Q.shape[1] or not 1 <= Q.shape[0] <= 3:
            raise ValueError("Q must be square of size 1..3")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ValueError("Q must be symmetric")
        w = np.linalg.eigvalsh(Q)
        if w.min() < -1e-12 * max(1.0, abs(w).max()):
            raise ValueError("Q must be positive semidefinite")
        object.__setattr__(self, "Q", Q)

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    def values(self, X) -> np.ndarray:
        P = _pts(X, self.dim)
        return 0.5 * np.einsum("ij,jk,ik->i", P, self.Q, P)

    def subgrad_interval(self, x):
        g = self.Q[0, 0] * x
        return (g, g)

    def gradient(self, x):
        return self.Q @ x


@dataclass(frozen=True, eq=False)
class PowerAbs(ConvexFunction):
    """``x -> c * |x|^k`` on R, with ``k >= 1`` and ``c > 0``.

    Exponent 1 coincides with a scaled absolute value; non-integer
    exponents such as 4/3 arise as conjugates of even powers.
    """

    k: float
    c: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("exponent must be >= 1 for convexity")
        if self.c <= 0:
            raise ValueError("coefficient must be positive")
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "c", float(self.c))

    dim = 1

    def values(self, X) -> np.ndarray:
        P = _pts(X, 1)[:, 0]
        return self.c * np.abs(P) ** self.k

    def subgrad_interval(self, x):
        if self.k == 1:
            if x == 0:
                return (-self.c, self.c)
            g = self.c * math.copysign(1.0, x)
            return (g, g)
        g = self.c * self.k * abs(x) ** (self.k - 1) * math.copysign(1.0, x) if x else 0.0
        return (g, g)


@dataclass(frozen=True, eq=False)
class ScaledNorm(ConvexFunction):
    """``x -> c * ||x_S||`` over the coordinate subset S (Euclidean norm)."""

    c: float
    coords: tuple[int, ...]
    dim: int = 1

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("norm coefficient must be nonnegative")
        coords = tuple(sorted(set(int(i) for i in self.coords)))
        if not coords or any(i < 0 or i >= self.dim for i in coords):
            raise ValueError("norm coordinates out of range")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "c", float(self.c))

    def values(self, X) -> np.ndarray:
        P = _pts(X, self.dim)
        return self.c * np.linalg.norm(P[:, self.coords], axis=1)

    def subgrad_interval(self, x):
        if self.dim != 1:
            return None
        if x == 0:
            return (-self.c, self.c)
        g = self.c * math.copysign(1.0, x)
        return (g, g)

    def gradient(self, x):
        xs = x[list(self.coords)]
        n = np.linalg.norm(xs)
        if n == 0:
            return None
        g = np.zeros(self.dim)
        g[list(self.coords)] = self.c * xs / n
        return g


@dataclass(frozen=True, eq=False)
class IndicatorOf(ConvexFunction):
    """0 on the set, +inf outside."""

    set_atom: SetAtom

    @property
    def dim(self) -> int:
        return self.set_atom.dim

    def values(self, X) -> np.ndarray:
        inside = self.set_atom.contains(X)
        return np.where(inside, 0.0, np.inf)

    def subgrad_interval(self, x):
        s = self.set_atom
        if self.dim != 1:
            return None
        if isinstance(s, Singleton):
            if x != s.point[0]:
                raise DomainError("outside effective domain")
            return (-math.inf, math.inf)
        if isinstance(s, Box):
            lo, hi = s.lo[0], s.hi[0]
            if not lo <= x <= hi:
                raise DomainError("outside effective domain")
            g_lo = -math.inf if x == lo else 0.0
            g_hi = math.inf if x == hi else 0.0
            return (g_lo, g_hi)
        if isinstance(s, Disc):
            r = s.radius
            if abs(x) > r:
                raise DomainError("outside effective domain")
            if abs(x) < r:
                return (0.0, 0.0)
            return (0.0, math.inf) if x > 0 else (-math.inf, 0.0)
        return None

    def gradient(self, x):
        # exact only strictly inside, where the normal cone is {0}
        return None


@dataclass(frozen=True, eq=False)
class Sum(ConvexFunction):
    terms: tuple[ConvexFunction, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("empty sum")
        if len({t.dim for t in terms}) != 1:
            raise ValueError("sum terms must share a dimension")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def values(self, X) -> np.ndarray:
        out = self.terms[0].values(X).copy()
        for t in self.terms[1:]:
            out = out + t.values(X)
        return out

    def subgrad_interval(self, x):
        lo = hi = 0.0
        for t in self.terms:
            iv = t.subgrad_interval(x)
            if iv is None:
                return None
            lo, hi = lo + iv[0], hi + iv[1]
        return (lo, hi)

    def gradient(self, x):
        g = np.zeros(self.dim)
        for t in self.terms:
            gt = t.gradient(x)
            if gt is None:
                return None
            g = g + gt
        return g


@dataclass(frozen=True, eq=False)
class MaxOf(ConvexFunction):
    terms: tuple[ConvexFunction, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("empty max")
        if len({t.dim for t in terms}) != 1:
            raise ValueError("max terms must share a dimension")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def values(self, X) -> np.ndarray:
        out = self.terms[0].values(X)
        for t in self.terms[1:]:
            out = np.maximum(out, t.values(X))
        return out

    def subgrad_interval(self, x):
        vals = [float(t.values(np.array([[x]]))[0]) for t in self.terms]
        vmax = max(vals)
        if vmax == math.inf:
            raise DomainError("outside effective domain")
        lo, hi = math.inf, -math.inf
        scale = 1e-12 * (1.0 + abs(vmax))
        for t, v in zip(self.terms, vals):
            if v >= vmax - scale:
                iv = t.subgrad_interval(x)
                if iv is None:
                    return None
                lo, hi = min(lo, iv[0]), max(hi, iv[1])
        return (lo, hi)


@dataclass(frozen=True, eq=False)
class Scaled(ConvexFunction):
    """Pointwise positive multiple ``x -> c * f(x)``."""

    c: float
    f: ConvexFunction

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("scale must be positive; a zero weight drops the term")
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return self.f.dim

    def values(self, X) -> np.ndarray:
        return self.c * self.f.values(X)

    def subgrad_interval(self, x):
        iv = self.f.subgrad_interval(x)
        return None if iv is None else (self.c * iv[0], self.c * iv[1])

    def gradient(self, x):
        g = self.f.gradient(x)
        return None if g is None else self.c * g


@dataclass(frozen=True, eq=False)
class PreScaled(ConvexFunction):
    """Epigraph scaling ``x -> lam * f(x / lam)`` for ``lam > 0``.

    Positively 1-homogeneous functions are fixed points of this map; its
    Fenchel conjugate is the pointwise multiple ``lam * f*``.
    """

    lam: float
    f: ConvexFunction

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("epigraph scale must be positive")
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def dim(self) -> int:
        return self.f.dim

    def values(self, X) -> np.ndarray:
        P = _pts(X, self.dim)
        return self.lam * self.f.values(P / self.lam)

    def subgrad_interval(self, x):
        return self.f.subgrad_interval(x / self.lam)

    def gradient(self, x):
        return self.f.gradient(x / self.lam)


@dataclass(frozen=True, eq=False)
class SampledFunction(ConvexFunction):
    """Extended-real values on a grid, multilinearly interpolated.

    A cell with both finite and infinite corners (among those carrying
    positive interpolation weight) evaluates to +inf, which keeps the
    interpolant an upper model near the boundary of the effective domain.
    Queries outside the grid hull raise :class:`DomainError` from the
    scalar API and map to +inf in sweeps that opt in.
    """

    grid: Grid
    vals: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vals, dtype=float)
        if v.shape != self.grid.shape:
            v = v.reshape(self.grid.shape)
        if np.any(np.isnan(v)) or np.any(v == -math.inf):
            raise ValueError("sampled values must be finite or +inf")
        object.__setattr__(self, "vals", v)

    @property
    def dim(self) -> int:
        return self.grid.dim

    def values(self, X, out_of_bounds: str = "raise") -> np.ndarray:
        P = _pts(X, self.dim)
        m = P.shape[0]
        inb = np.ones(m, dtype=bool)
        idx, t = [], []
        for k, a in enumerate(self.grid.axes):
            xk = P[:, k]
            inb &= (xk >= a[0]) & (xk <= a[-1])
            i = np.clip(np.searchsorted(a, xk, side="right") - 1, 0, a.size - 2)
            idx.append(i)
            t.append((xk - a[i]) / (a[i + 1] - a[i]))
        if not np.all(inb):
            if out_of_bounds == "raise":
                raise DomainError("query outside the sampled grid hull")
        acc = np.zeros(m)
        any_inf = np.zeros(m, dtype=bool)
        for corner in range(2 ** self.dim):
            w = np.ones(m)
            ci = []
            for k in range(self.dim):
                if corner >> k & 1:
                    w = w * t[k]
                    ci.append(np.minimum(idx[k] + 1, self.grid.axes[k].size - 1))
                else:
                    w = w * (1.0 - t[k])
                    ci.append(idx[k])
            v = self.vals[tuple(ci)]
            pos = w > 0
            any_inf |= pos & np.isinf(v)
            acc += np.where(pos & np.isfinite(v), w * np.where(np.isfinite(v), v, 0.0), 0.0)
        out = np.where(any_inf, np.inf, acc)
        return np.where(inb, out, np.inf)


def evaluate(f: ConvexFunction, x) -> ExtReal:
    """Evaluate ``f`` at a single point, returning an extended real."""
    xv = as_vector(x, dim=f.dim)
    v = float(f.values(xv[None, :])[0])
    return INF if v == math.inf else ExtReal(v)


# ---------------------------------------------------------------------------
# closed-form conjugation
# ---------------------------------------------------------------------------

def _scale_into(f: ConvexFunction, c: float) -> ConvexFunction:
    """Fold a positive pointwise factor into the representation when closed."""
    if isinstance(f, Affine):
        return Affine(c * f.a, c * f.c)
    if isinstance(f, Quadratic):
        return Quadratic(c * f.Q)
    if isinstance(f, PowerAbs):
        return PowerAbs(f.k, c * f.c)
    if isinstance(f, ScaledNorm):
        return ScaledNorm(c * f.c, f.coords, f.dim)
    if isinstance(f, IndicatorOf):
        return f
    if isinstance(f, Sum):
        return Sum(tuple(_scale_into(t, c) for t in f.terms))
    if isinstance(f, MaxOf):
        return MaxOf(tuple(_scale_into(t, c) for t in f.terms))
    if isinstance(f, Scaled):
        return _scale_into(f.f, c * f.c)
    return Scaled(c, f)


def _flatten(f: ConvexFunction) -> tuple[list[ConvexFunction], np.ndarray, float]:
    """Split into non-affine summands plus a total affine part ``(a, c)``."""
    summands: list[ConvexFunction] = []
    a = np.zeros(f.dim)
    c = 0.0

    def walk(g: ConvexFunction):
        nonlocal a, c
        if isinstance(g, Sum):
            for t in g.terms:
                walk(t)
        elif isinstance(g, Scaled):
            walk(_scale_into(g.f, g.c))
        elif isinstance(g, Affine):
            a = a + g.a
            c += g.c
        elif isinstance(g, ScaledNorm) and g.c == 0.0:
            pass
        else:
            summands.append(g)

    walk(f)
    return summands, a, c


def _support(f: ConvexFunction) -> frozenset[int]:
    if isinstance(f, Quadratic):
        return frozenset(int(i) for i in np.nonzero(np.any(f.Q != 0, axis=0))[0])
    if isinstance(f, PowerAbs):
        return frozenset({0})
    if isinstance(f, ScaledNorm):
        return frozenset(f.coords) if f.c > 0 else frozenset()
    if isinstance(f, IndicatorOf):
        return f.set_atom.support_coords()
    if isinstance(f, (Sum, MaxOf)):
        out: frozenset[int] = frozenset()
        for t in f.terms:
            out = out | _support(t)
        return out
    if isinstance(f, (Scaled, PreScaled)):
        return _support(f.f)
    if isinstance(f, Affine):
        return frozenset(int(i) for i in np.nonzero(f.a)[0])
    return frozenset(range(f.dim))


def _embed_vec(dim: int, coords, vals) -> np.ndarray:
    v = np.zeros(dim)
    v[list(coords)] = vals
    return v


def _axis_box_conjugate(dim: int, axis: int, lo: float, hi: float,
                        shift: float) -> list[ConvexFunction]:
    """Summands of the conjugate of a one-axis interval indicator, with the
    conjugate argument shifted by ``shift`` on that axis."""
    e = _embed_vec(dim, [axis], [1.0])
    if lo == hi:
        return [Affine(lo * e, -lo * shift)]
    parts: list[ConvexFunction] = []
    if lo > -math.inf and hi < math.inf:
        return [MaxOf((Affine(lo * e, -lo * shift), Affine(hi * e, -hi * shift)))]
    if lo > -math.inf:  # [lo, +inf): support finite only below the shift
        if lo != 0.0:
            parts.append(Affine(lo * e, -lo * shift))
        b_lo = np.full(dim, -math.inf)
        b_hi = np.full(dim, math.inf)
        b_hi[axis] = shift
        parts.append(IndicatorOf(Box(b_lo, b_hi)))
        return parts
    if hi < math.inf:  # (-inf, hi]
        if hi != 0.0:
            parts.append(Affine(hi * e, -hi * shift))
        b_lo = np.full(dim, -math.inf)
        b_hi = np.full(dim, math.inf)
        b_lo[axis] = shift
        parts.append(IndicatorOf(Box(b_lo, b_hi)))
        return parts
    # free axis: conjugate pins the dual coordinate to the shift
    b = np.full(dim, -math.inf), np.full(dim, math.inf)
    b[0][axis] = b[1][axis] = shift
    return [IndicatorOf(Box(b[0], b[1]))]


def _conjugate_block(g: ConvexFunction, coords: frozenset[int],
                     shift: np.ndarray, dim: int) -> list[ConvexFunction]:
    """Conjugate of one summand on its own coordinate block.

    ``shift`` is the ambient affine slope vector; the returned summands
    evaluate ``g*(y_B - shift_B)`` exactly.
    """
    s = shift

    if isinstance(g, Quadratic):
        sub = sorted(coords)
        Qs = g.Q[np.ix_(sub, sub)]
        try:
            Qi = np.linalg.inv(Qs)
        except np.linalg.LinAlgError:
            raise ConjugateUnavailable("singular quadratic block")
        if np.linalg.eigvalsh(Qs).min() <= 0:
            raise ConjugateUnavailable("quadratic block not positive definite")
        Qfull = np.zeros((dim, dim))
        Qfull[np.ix_(sub, sub)] = Qi
        a_b = s[sub]
        parts: list[ConvexFunction] = [Quadratic(Qfull)]
        if np.any(a_b != 0):
            lin = _embed_vec(dim, sub, -(Qi @ a_b))
            parts.append(Affine(lin, 0.5 * a_b @ Qi @ a_b))
        return parts

    if isinstance(g, PowerAbs):
        if s[0] != 0:
            raise ConjugateUnavailable("shifted power conjugate not tabulated")
        if g.k == 1:
            return [IndicatorOf(Box(np.array([-g.c]), np.array([g.c])))]
        kk = g.k / (g.k - 1.0)
        cc = (g.k - 1.0) / g.k * (g.c * g.k) ** (-1.0 / (g.k - 1.0))
        return [PowerAbs(kk, cc)]

    if isinstance(g, ScaledNorm):
        if np.any(s[list(g.coords)] != 0):
            raise ConjugateUnavailable("shifted norm conjugate not tabulated")
        return [IndicatorOf(Disc(g.c, g.coords, dim))]

    if isinstance(g, IndicatorOf):
        atom = g.set_atom
        if isinstance(atom, Singleton):
            v = atom.point
            return [Affine(v.copy(), -float(v @ s))]
        if isinstance(atom, Box):
            parts: list[ConvexFunction] = []
            for ax in sorted(coords):
                parts.extend(
                    _axis_box_conjugate(dim, ax, atom.lo[ax], atom.hi[ax], s[ax]))
            return parts
        if isinstance(atom, Disc):
            if np.any(s[list(atom.coords)] != 0):
                raise ConjugateUnavailable("shifted disc support not tabulated")
            if atom.radius == 0:
                return [Affine(np.zeros(dim), 0.0)]
            return [ScaledNorm(atom.radius, atom.coords, dim)]
        if isinstance(atom, CoulombCone):
            if np.any(s != 0):
                raise ConjugateUnavailable("shifted cone support not tabulated")
            return [IndicatorOf(DualCoulombCone(atom.mu))]
        if isinstance(atom, DualCoulombCone):
            if np.any(s != 0):
                raise ConjugateUnavailable("shifted cone support not tabulated")
            return [IndicatorOf(CoulombCone(atom.mu))]
        raise ConjugateUnavailable(f"no support-function rule for {type(atom).__name__}")

    if isinstance(g, PreScaled):
        inner = _conjugate_block(g.f, coords, s, dim)
        return [_scale_into(_sum_or_single(inner), g.lam)]

    if isinstance(g, Scaled):
        if np.any(s != 0):
            raise ConjugateUnavailable("shifted scaled conjugate not tabulated")
        inner = _conjugate_block(g.f, coords, s, dim)
        return [PreScaled(g.c, _sum_or_single(inner))]

    raise ConjugateUnavailable(f"no conjugate rule for {type(g).__name__}")


def _sum_or_single(parts: list[ConvexFunction]) -> ConvexFunction:
    return parts[0] if len(parts) == 1 else Sum(tuple(parts))


def closed_form_conjugate(f: ConvexFunction) -> ConvexFunction:
    """Exact Fenchel conjugate from the rule table.

    Decomposes ``f`` into summands acting on disjoint coordinate blocks
    (the affine part shifts the conjugate argument blockwise) and applies
    per-block rules.  Raises :class:`ConjugateUnavailable` when two
    summands share a coordinate or a block has no rule; the numeric
    transform :func:`fenchel_conjugate` covers those cases.
    """
    if isinstance(f, SampledFunction):
        raise ConjugateUnavailable("sampled functions conjugate numerically")
    summands, a, c = _flatten(f)
    dim = f.dim

    # group summands into connected coordinate blocks
    blocks: list[tuple[set[int], list[ConvexFunction]]] = []
    for g in summands:
        sup = set(_support(g))
        merged = [b for b in blocks if b[0] & sup]
        for b in merged:
            blocks.remove(b)
            sup |= b[0]
        members = [g] + [m for b in merged for m in b[1]]
        blocks.append((sup, members))

    parts: list[ConvexFunction] = []
    covered: set[int] = set()
    for sup, members in blocks:
        if len(members) > 1:
            raise ConjugateUnavailable(
                "summands share coordinates; no closed-form rule")
        parts.extend(_conjugate_block(members[0], frozenset(sup), a, dim))
        covered |= sup

    free = [i for i in range(dim) if i not in covered]
    if free:
        lo = np.full(dim, -math.inf)
        hi = np.full(dim, math.inf)
        for i in free:
            lo[i] = hi[i] = a[i]
        parts.append(IndicatorOf(Box(lo, hi)))

    if c != 0.0:
        parts.append(Affine(np.zeros(dim), -c))
    if not parts:
        parts.append(Affine(np.zeros(dim), -c))
    return _sum_or_single(parts)


# ---------------------------------------------------------------------------
# numeric conjugation
# ---------------------------------------------------------------------------

def fenchel_conjugate(f: ConvexFunction, dual_grid: Grid,
                      primal_grid: Grid | None = None,
                      radius: float = DEFAULT_RADIUS) -> SampledFunction:
    """Grid sup ``y -> max_x <y, x> - f(x)`` over the primal grid.

    This is the exact conjugate of ``f`` truncated to the primal box.
    """
    if primal_grid is None:
        primal_grid = Grid.uniform(radius, DEFAULT_NODES[f.dim], f.dim)
    P = primal_grid.nodes
    fv = f.values(P) if not isinstance(f, SampledFunction) \
        else f.values(P, out_of_bounds="inf")
    finite = np.isfinite(fv)
    if not finite.any():
        raise EmptyDomainError("function is +inf on the whole primal grid")
    Pf, ff = P[finite], fv[finite]
    D = dual_grid.nodes
    out = np.empty(D.shape[0])
    chunk = max(1, (1 << 22) // max(1, Pf.shape[0]))
    for s in range(0, D.shape[0], chunk):
        block = D[s:s + chunk]
        out[s:s + chunk] = np.max(block @ Pf.T - ff[None, :], axis=1)
    return SampledFunction(dual_grid, out.reshape(dual_grid.shape))


def _lower_hull(xs: np.ndarray, fs: np.ndarray) -> np.ndarray:
    """Indices of the lower convex hull of ``(xs, fs)``, xs strictly increasing."""
    hull: list[int] = []
    for i in range(xs.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b when it lies on or above chord a--i
            if (xs[i] - xs[a]) * (fs[b] - fs[a]) >= (xs[b] - xs[a]) * (fs[i] - fs[a]):
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull, dtype=int)


def fast_conjugate_1d(f: ConvexFunction, dual_grid: Grid,
                      primal_grid: Grid | None = None,
                      radius: float = DEFAULT_RADIUS) -> SampledFunction:
    """Linear-time 1-D conjugate via the lower hull and a monotone argmax sweep.

    Agrees with the brute-force transform on identical grids because
    both evaluate the same products at the same nodes; the hull only
    prunes points that can never attain the max.
    """
    if f.dim != 1:
        raise ValueError("fast transform is one-dimensional")
    if primal_grid is None:
        primal_grid = Grid.uniform(radius, DEFAULT_NODES[1], 1)
    xs = primal_grid.axes[0]
    fv = f.values(xs[:, None]) if not isinstance(f, SampledFunction) \
        else f.values(xs[:, None], out_of_bounds="inf")
    finite = np.isfinite(fv)
    if not finite.any():
        raise EmptyDomainError("function is +inf on the whole primal grid")
    xs_f, fs_f = xs[finite], fv[finite]
    hull = _lower_hull(xs_f, fs_f)
    hx, hf = xs_f[hull], fs_f[hull]
    ys = dual_grid.axes[0]
    out = np.empty(ys.size)
    j = 0
    for i, y in enumerate(ys):
        while j + 1 < hx.size and hx[j + 1] * y - hf[j + 1] >= hx[j] * y - hf[j]:
            j += 1
        out[i] = hx[j] * y - hf[j]
    return SampledFunction(dual_grid, out)


# ---------------------------------------------------------------------------
# inf-convolution
# ---------------------------------------------------------------------------

def _sweep_values(f: ConvexFunction, X: np.ndarray) -> np.ndarray:
    if isinstance(f, SampledFunction):
        return f.values(X, out_of_bounds="inf")
    return f.values(X)


def inf_convolution(f: ConvexFunction, g: ConvexFunction,
                    grid: Grid) -> SampledFunction:
    """``(f box g)(x) = min over grid splits x1 + (x - x1) = x``.

    The split point x1 ranges over the grid nodes; ``g`` is evaluated
    exactly at the complementary points (sampled representations map
    out-of-hull complements to +inf, consistent with truncation).
    """
    if f.dim != g.dim or f.dim != grid.dim:
        raise ValueError("dimension mismatch")
    nodes = grid.nodes
    fv = _sweep_values(f, nodes)
    out = np.empty(nodes.shape[0])
    for i in range(nodes.shape[0]):
        gv = _sweep_values(g, nodes[i] - nodes)
        out[i] = np.min(fv + gv)
    return SampledFunction(grid, out.reshape(grid.shape))


# ---------------------------------------------------------------------------
# subdifferentials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubgradientEstimate:
    """Probe-validated subgradient information at a point.

    In one dimension ``(lo, hi)`` bound the subdifferential interval
    (possibly unbounded, possibly empty when ``lo > hi``).  In higher
    dimension ``slopes`` lists supporting slopes with the worst violation
    of the subgradient inequality observed over the probe set.
    """

    dim: int
    lo: float = math.nan
    hi: float = math.nan
    slopes: tuple[tuple[np.ndarray, float], ...] = ()
    exact: bool = False

    @property
    def is_empty(self) -> bool:
        if self.dim == 1:
            return not self.lo <= self.hi
        return not self.slopes

    def contains_slope(self, u: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= u <= self.hi + tol

    def hausdorff_1d(self, other: "SubgradientEstimate") -> float:
        if self.is_empty or other.is_empty:
            return math.inf
        return max(abs(self.lo - other.lo), abs(self.hi - other.hi))


def _chord_bounds(f: ConvexFunction, x: float, fx: float,
                  probes: np.ndarray) -> tuple[float, float]:
    """Extreme grid-valid slopes: every u in [lo, hi] satisfies the
    subgradient inequality on all finite probe points by construction."""
    pv = _sweep_values(f, probes[:, None])
    finite = np.isfinite(pv)
    zs, vs = probes[finite], pv[finite]
    left = zs < x
    right = zs > x
    lo = -math.inf
    hi = math.inf
    if left.any():
        lo = float(np.max((fx - vs[left]) / (x - zs[left])))
    if right.any():
        hi = float(np.min((vs[right] - fx) / (zs[right] - x)))
    return lo, hi


def subdifferential(f: ConvexFunction, x, tol: float = 1e-6,
                    probe_grid: Grid | None = None) -> SubgradientEstimate:
    """Subdifferential estimate at ``x``; raises outside the domain.

    Closed-form atoms use exact rules where tabulated (norms at the
    kink give the full ball, indicators give normal-cone bounds); all
    other representations fall back to chord-slope bounds over the
    probe grid, which satisfy the subgradient inequality on every probe
    by construction.
    """
    xv = as_vector(x, dim=f.dim)
    fx = float(_sweep_values(f, xv[None, :])[0])
    if fx == math.inf:
        raise DomainError("outside effective domain")
    if probe_grid is None:
        probe_grid = f.grid if isinstance(f, SampledFunction) \
            else Grid.uniform(DEFAULT_RADIUS, DEFAULT_NODES[f.dim], f.dim)

    if f.dim == 1:
        try:
            iv = f.subgrad_interval(float(xv[0]))
        except DomainError:
            raise
        if iv is not None:
            return SubgradientEstimate(1, lo=iv[0], hi=iv[1], exact=True)
        lo, hi = _chord_bounds(f, float(xv[0]), fx, probe_grid.axes[0])
        return SubgradientEstimate(1, lo=lo, hi=hi)

    probes = probe_grid.nodes
    pv = _sweep_values(f, probes)
    finite = np.isfinite(pv)

    def residual(u: np.ndarray) -> float:
        viol = fx + (probes[finite] - xv) @ u - pv[finite]
        return float(np.max(viol)) if viol.size else 0.0

    g = f.gradient(xv)
    if g is not None:
        return SubgradientEstimate(f.dim, slopes=((g, residual(g)),), exact=True)
    # central differences along each axis at the probe scale
    h = probe_grid.modulus()
    u = np.zeros(f.dim)
    for k in range(f.dim):
        e = np.zeros(f.dim)
        e[k] = h
        vp = float(_sweep_values(f, (xv + e)[None, :])[0])
        vm = float(_sweep_values(f, (xv - e)[None, :])[0])
        if not (math.isfinite(vp) and math.isfinite(vm)):
            return SubgradientEstimate(f.dim, slopes=())
        u[k] = (vp - vm) / (2 * h)
    r = residual(u)
    scale = tol * (1.0 + abs(fx))
    slopes = ((u, r),) if r <= scale else ()
    return SubgradientEstimate(f.dim, slopes=slopes)


# ---------------------------------------------------------------------------
# combinations and scalings
# ---------------------------------------------------------------------------

def convex_combination(lam: float, f1: ConvexFunction,
                       f2: ConvexFunction) -> ConvexFunction:
    """``lam * f1 + (1 - lam) * f2`` with the 0 * (+inf) = 0 endpoint rule."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("weight must lie in [0, 1]")
    if f1.dim != f2.dim:
        raise ValueError("dimension mismatch")
    if lam == 1.0:
        return f1
    if lam == 0.0:
        return f2
    return Sum((Scaled(lam, f1), Scaled(1.0 - lam, f2)))


def scaled_function(lam: float, f: ConvexFunction, which: int) -> PreScaled:
    """The epigraph scalings ``lam * f(x/lam)`` (which=1) and
    ``(1-lam) * f(x/(1-lam))`` (which=2), for ``0 < lam < 1``."""
    if not 0.0 < lam < 1.0:
        raise ValueError("weight must lie strictly inside (0, 1)")
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    w = lam if which == 1 else 1.0 - lam
    return PreScaled(w, f)


# ---------------------------------------------------------------------------
# convexity report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvexityReport:
    is_convex: bool
    worst_violation: float
    witness: tuple | None = None
    domain_convex: bool = True

    def __bool__(self) -> bool:
        return self.is_convex


def _line_convexity(vals: np.ndarray, axis_nodes: np.ndarray, axis: int,
                    tol: float) -> tuple[float, tuple | None, bool]:
    """Worst chord violation along one grid axis of an n-D value array."""
    V = np.moveaxis(vals, axis, -1)
    a = V[..., :-2]
    m = V[..., 1:-1]
    b = V[..., 2:]
    x0 = axis_nodes[:-2]
    x1 = axis_nodes[1:-1]
    x2 = axis_nodes[2:]
    wl = (x2 - x1) / (x2 - x0)
    wr = (x1 - x0) / (x2 - x0)
    ends_finite = np.isfinite(a) & np.isfinite(b)
    dom_break = ends_finite & np.isinf(m)
    domain_ok = not bool(np.any(dom_break))
    with np.errstate(invalid="ignore"):
        chord = wl * np.where(np.isfinite(a), a, 0.0) + wr * np.where(np.isfinite(b), b, 0.0)
        viol = np.where(ends_finite & np.isfinite(m), m - chord, -np.inf)
    worst = float(np.max(viol)) if viol.size else -math.inf
    witness = None
    if worst > tol or not domain_ok:
        if not domain_ok:
            worst = math.inf
            flat = np.argmax(dom_break)
        else:
            flat = np.argmax(viol)
        witness = ("axis", axis, np.unravel_index(flat, a.shape))
    return worst, witness, domain_ok


def is_convex_on_grid(f: SampledFunction, tol: float = 1e-9) -> ConvexityReport:
    """Chord-convexity of the samples along every grid line (finite values
    only); an infinite value between two finite ones breaks convexity of
    the effective domain and is reported as an infinite violation."""
    worst = -math.inf
    witness = None
    domain_ok = True
    for axis, nodes in enumerate(f.grid.axes):
        w, wit, dok = _line_convexity(f.vals, nodes, axis, tol)
        if w > worst:
            worst, witness = w, wit
        domain_ok &= dok
    scale = tol * (1.0 + float(np.max(np.abs(f.vals[np.isfinite(f.vals)]), initial=1.0)))
    ok = domain_ok and worst <= scale
    return ConvexityReport(ok, worst if worst > -math.inf else 0.0,
                           witness if not ok else None, domain_ok)

"""Unilateral contact with dry friction, in closed form.

The contact variables are ``x = (x_n, x_t)`` (gap velocity, sliding
velocity) and ``y = (y_n, y_t)`` (contact pressure, minus the friction
stress), with ``x_t, y_t`` planar.  The law is the union of three
branches: body separation (``x_n < 0``, zero reaction), sticking
(``x = 0``, reaction inside the friction cone) and sliding (``x_n = 0``,
slip aligned with the tangential reaction on the cone boundary).  The
graph is not monotone, but slices it at fixed pressure ``p`` into
subgraphs that are cyclically monotone without being maximal.

Everything here is exact arithmetic on the closed forms: the potential
pair ``phi_p / psi_p`` and their duals, the pressure-indexed bipotential
``b_p``, and the friction bipotential

    ``b(x, y) = mu y_n ||x_t|| + ind(y in K_mu) + ind(x_n <= 0)``.

Samplers emit couples that satisfy the exact cone inequalities in
floating point (boundary reactions are nudged inside by a few ulps), so
indicator terms never spuriously fire on generated data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bipotentials import ClosedFormBipotential, MaxOfTwo, Separable
from .convex import (
    Affine,
    Box,
    ConvexFunction,
    CoulombCone,
    Disc,
    DualCoulombCone,
    IndicatorOf,
    ScaledNorm,
    Singleton,
    Sum,
    halfspace_nonpositive,
)
from .core import INF, ExtReal, as_vector
from .graphs import GraphSample

__all__ = [
    "CoulombParams",
    "ContactPoint",
    "ContactKind",
    "Classification",
    "classify",
    "cone_membership",
    "potential_family",
    "b_p",
    "b_p_values",
    "b_p_spec",
    "coulomb_bipotential",
    "coulomb_values",
    "coulomb_spec",
    "coulomb_cover",
    "sample_graph",
    "sample_mp",
    "sample_m0",
    "stratified_probes",
]


@dataclass(frozen=True)
class CoulombParams:
    """Friction coefficient, strictly positive."""

    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("friction coefficient must be positive")


@dataclass(frozen=True, eq=False)
class ContactPoint:
    x_n: float
    x_t: np.ndarray
    y_n: float
    y_t: np.ndarray

    def __post_init__(self):
        xt = as_vector(self.x_t, dim=2)
        yt = as_vector(self.y_t, dim=2)
        if not (math.isfinite(self.x_n) and math.isfinite(self.y_n)):
            raise ValueError("contact components must be finite")
        object.__setattr__(self, "x_t", xt)
        object.__setattr__(self, "y_t", yt)

    @property
    def x(self) -> np.ndarray:
        return np.concatenate([[self.x_n], self.x_t])

    @property
    def y(self) -> np.ndarray:
        return np.concatenate([[self.y_n], self.y_t])

    @classmethod
    def from_vectors(cls, x, y) -> "ContactPoint":
        xv = as_vector(x, dim=3)
        yv = as_vector(y, dim=3)
        return cls(float(xv[0]), xv[1:], float(yv[0]), yv[1:])


class ContactKind(Enum):
    SEPARATION = "separation"
    STICKING = "sticking"
    SLIDING = "sliding"
    NOT_IN_GRAPH = "not_in_graph"


@dataclass(frozen=True)
class Classification:
    kind: ContactKind
    slip_direction: np.ndarray | None = None

    @property
    def in_graph(self) -> bool:
        return self.kind is not ContactKind.NOT_IN_GRAPH


def classify(pt: ContactPoint, params: CoulombParams,
             tol: float = 1e-9) -> Classification:
    """Branch membership of a contact couple.

    Sticking wins over sliding at ``x = 0`` (the sliding branch demands
    a genuinely nonzero slip).  Sliding with zero pressure is kept
    in-graph as the limit of the sliding branch.
    """
    mu = params.mu
    x_n, x_t, y_n, y_t = pt.x_n, pt.x_t, pt.y_n, pt.y_t
    if x_n < -tol and np.linalg.norm(pt.y) <= tol:
        return Classification(ContactKind.SEPARATION)
    if np.linalg.norm(pt.x) <= tol and np.linalg.norm(y_t) <= mu * y_n + tol:
        return Classification(ContactKind.STICKING)
    nt = float(np.linalg.norm(x_t))
    if abs(x_n) <= tol and nt > tol and y_n >= -tol:
        slip = x_t / nt
        if np.linalg.norm(y_t - mu * y_n * slip) <= tol:
            return Classification(ContactKind.SLIDING, slip)
    return Classification(ContactKind.NOT_IN_GRAPH)


_CONES = {"K_mu", "K_mu_star", "K_0", "K_0_star", "disc"}


def cone_membership(v, cone: str, params: CoulombParams,
                    p: float | None = None) -> bool:
    """Exact membership in one of the contact cones or the pressure disc."""
    if cone not in _CONES:
        raise ValueError(f"unknown cone {cone!r}")
    if cone == "disc":
        if p is None:
            raise ValueError("disc membership needs the pressure level p")
        vv = as_vector(v, dim=2)
        return bool(Disc(params.mu * p, (0, 1), 2).contains(vv[None, :])[0])
    vv = as_vector(v, dim=3)
    atom = {
        "K_mu": CoulombCone(params.mu),
        "K_mu_star": DualCoulombCone(params.mu),
        "K_0": Box(np.array([0.0, 0.0, 0.0]), np.array([math.inf, 0.0, 0.0])),
        "K_0_star": halfspace_nonpositive(3, 0),
    }[cone]
    return bool(atom.contains(vv[None, :])[0])


def _pin_axis(value: float) -> Box:
    lo = np.array([value, -math.inf, -math.inf])
    hi = np.array([value, math.inf, math.inf])
    return Box(lo, hi)


def potential_family(p: float, which: str, params: CoulombParams) -> ConvexFunction:
    """The pressure-indexed potentials and their Fenchel duals.

    For ``p > 0``::

        phi_p(x)   = p x_n + mu p ||x_t||
        psi_p(y)   = ind(||y_t|| <= mu p)
        phi_p*(y)  = ind(y_n = p) + ind(||y_t|| <= mu p)
        psi_p*(x)  = mu p ||x_t|| + ind(x_n = 0)

    and for ``p = 0``::

        phi_0 = 0,  psi_0 = ind(K_0),  phi_0* = ind({0}),  psi_0* = ind(K_0*)
    """
    if p < 0:
        raise ValueError("pressure level must be nonnegative")
    mu = params.mu
    if p == 0:
        if which == "phi":
            return Affine(np.zeros(3), 0.0)
        if which == "psi":
            return IndicatorOf(Box(np.array([0.0, 0.0, 0.0]),
                                   np.array([math.inf, 0.0, 0.0])))
        if which == "phi_star":
            return IndicatorOf(Singleton(np.zeros(3)))
        if which == "psi_star":
            return IndicatorOf(halfspace_nonpositive(3, 0))
        raise ValueError(f"unknown potential {which!r}")
    if which == "phi":
        return Sum((Affine(np.array([p, 0.0, 0.0]), 0.0),
                    ScaledNorm(mu * p, (1, 2), 3)))
    if which == "psi":
        return IndicatorOf(Disc(mu * p, (1, 2), 3))
    if which == "phi_star":
        return Sum((IndicatorOf(_pin_axis(p)),
                    IndicatorOf(Disc(mu * p, (1, 2), 3))))
    if which == "psi_star":
        return Sum((ScaledNorm(mu * p, (1, 2), 3), IndicatorOf(_pin_axis(0.0))))
    raise ValueError(f"unknown potential {which!r}")


def b_p_values(p: float, X, Y, params: CoulombParams) -> np.ndarray:
    """Paired values of the pressure-p bipotential on ``(m, 3)`` arrays."""
    if p < 0:
        raise ValueError("pressure level must be nonnegative")
    mu = params.mu
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if p == 0:
        ok = (np.all(Y == 0.0, axis=1)) & (X[:, 0] <= 0.0)
        return np.where(ok, 0.0, np.inf)
    ok = ((np.linalg.norm(Y[:, 1:], axis=1) <= mu * p)
          & (Y[:, 0] == p) & (X[:, 0] == 0.0))
    vals = mu * p * np.linalg.norm(X[:, 1:], axis=1)
    return np.where(ok, vals, np.inf)


def b_p(p: float, x, y, params: CoulombParams) -> ExtReal:
    """``b_p(x, y) = mu p ||x_t|| + ind(||y_t|| <= mu p) + ind(y_n = p)
    + ind(x_n = 0)`` for ``p > 0``; for ``p = 0`` it degenerates to
    ``ind(y = 0) + ind(x_n <= 0)``."""
    xv = as_vector(x, dim=3)
    yv = as_vector(y, dim=3)
    v = float(b_p_values(p, xv[None, :], yv[None, :], params)[0])
    return INF if v == math.inf else ExtReal(v)


def b_p_spec(p: float, params: CoulombParams) -> MaxOfTwo:
    """``b_p`` as the maximum of its two separable branches
    ``phi_p + phi_p*`` and ``psi_p* + psi_p``."""
    phi = potential_family(p, "phi", params)
    phi_star = potential_family(p, "phi_star", params)
    psi = potential_family(p, "psi", params)
    psi_star = potential_family(p, "psi_star", params)
    return MaxOfTwo(Separable(phi, phi_star), Separable(psi_star, psi))


def coulomb_values(X, Y, params: CoulombParams) -> np.ndarray:
    """Paired values of the friction bipotential on ``(m, 3)`` arrays."""
    mu = params.mu
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    in_cone = np.linalg.norm(Y[:, 1:], axis=1) <= mu * Y[:, 0]
    x_ok = X[:, 0] <= 0.0
    vals = mu * Y[:, 0] * np.linalg.norm(X[:, 1:], axis=1)
    return np.where(in_cone & x_ok, vals, np.inf)


def coulomb_bipotential(x, y, params: CoulombParams) -> ExtReal:
    """``b(x, y) = mu y_n ||x_t|| + ind(y in K_mu) + ind(x in K_0*)``."""
    xv = as_vector(x, dim=3)
    yv = as_vector(y, dim=3)
    v = float(coulomb_values(xv[None, :], yv[None, :], params)[0])
    return INF if v == math.inf else ExtReal(v)


def coulomb_spec(params: CoulombParams) -> ClosedFormBipotential:
    def matrix(X, Y):
        mu = params.mu
        in_cone = np.linalg.norm(Y[:, 1:], axis=1) <= mu * Y[:, 0]
        x_ok = X[:, 0] <= 0.0
        core = mu * np.linalg.norm(X[:, 1:], axis=1)[:, None] * Y[:, 0][None, :]
        bad = ~(x_ok[:, None] & in_cone[None, :])
        return np.where(bad, np.inf, core)

    return ClosedFormBipotential(
        fn=lambda x, y: float(coulomb_values(x[None, :], y[None, :], params)[0]),
        dim_x=3, dim_y=3, name="coulomb", matrix_fn=matrix)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _shrink_into_disc(y_t: np.ndarray, cap: float) -> np.ndarray:
    """Scale the planar vector down by ulps until ``||y_t|| <= cap`` holds
    in floating point; boundary constructions can overshoot by rounding."""
    out = y_t.copy()
    for _ in range(8):
        if np.linalg.norm(out) <= cap:
            return out
        out = out * (1.0 - 4e-16)
    return out * (cap / np.linalg.norm(out) * (1.0 - 1e-12))


def _directions(n: int) -> np.ndarray:
    th = 2.0 * math.pi * np.arange(n) / n
    return np.stack([np.cos(th), np.sin(th)], axis=1)


def sample_graph(params: CoulombParams, branch: str = "all",
                 p_values=(0.5, 1.0, 2.0), n_directions: int = 8,
                 n_radii: int = 4, n_speeds: int = 5,
                 n_separation: int = 24) -> GraphSample:
    """Deterministic stratified sample of the friction graph.

    Sticking couples put ``x = 0`` and spread reactions over polar grids
    of each pressure disc; sliding couples put the reaction on the cone
    boundary and the slip along it with log-spaced magnitudes; separation
    couples spread opening velocities against a zero reaction.  Every
    emitted couple classifies into its branch.
    """
    branch = branch.lower()
    if branch not in {"separation", "sticking", "sliding", "all"}:
        raise ValueError(f"unknown branch {branch!r}")
    mu = params.mu
    xs: list[np.ndarray] = []
    ys: list[np.ndarray] = []

    if branch in {"separation", "all"}:
        gaps = -np.geomspace(0.05, 4.0, max(2, n_separation // 4))
        slides = np.array([[0.0, 0.0], [1.0, 0.0], [-0.5, 1.5], [3.0, -2.0]])
        for g in gaps:
            for st in slides:
                xs.append(np.array([g, st[0], st[1]]))
                ys.append(np.zeros(3))

    dirs = _directions(n_directions)
    if branch in {"sticking", "all"}:
        radii = np.linspace(0.0, 1.0, n_radii + 1)
        for p in p_values:
            cap = mu * p
            for r in radii:
                for u in (dirs if r > 0 else dirs[:1]):
                    y_t = _shrink_into_disc(r * cap * u, cap)
                    xs.append(np.zeros(3))
                    ys.append(np.array([p, y_t[0], y_t[1]]))
                    if r == 0:
                        break

    if branch in {"sliding", "all"}:
        speeds = np.geomspace(1e-3, 1e3, n_speeds)
        for p in p_values:
            cap = mu * p
            for u in dirs:
                y_t = _shrink_into_disc(cap * u, cap)
                for lam in speeds:
                    xs.append(np.array([0.0, lam * y_t[0], lam * y_t[1]]))
                    ys.append(np.array([p, y_t[0], y_t[1]]))

    M = GraphSample(np.array(xs), np.array(ys))
    for x, y in zip(M.xs, M.ys):
        c = classify(ContactPoint.from_vectors(x, y), params)
        if not c.in_graph:
            raise AssertionError("sampler emitted an off-graph couple")
    return M


def sample_mp(p: float, params: CoulombParams, n_sticking: int = 120,
              n_sliding: int = 80) -> GraphSample:
    """Stratified sample of the fixed-pressure subgraph ``M_p`` (``p > 0``):
    sticking couples at ``x = 0`` plus sliding couples along the disc
    boundary."""
    if p <= 0:
        raise ValueError("M_p sampling needs p > 0")
    mu = params.mu
    cap = mu * p
    xs: list[np.ndarray] = []
    ys: list[np.ndarray] = []

    n_dir = max(4, n_sticking // 5)
    radii = np.linspace(0.0, 1.0, max(2, n_sticking // n_dir) + 1)
    for r in radii:
        for u in (_directions(n_dir) if r > 0 else _directions(1)):
            y_t = _shrink_into_disc(r * cap * u, cap)
            xs.append(np.zeros(3))
            ys.append(np.array([p, y_t[0], y_t[1]]))
            if r == 0:
                break

    n_dir_s = max(4, n_sliding // 5)
    speeds = np.geomspace(1e-2, 1e2, max(2, n_sliding // n_dir_s))
    for u in _directions(n_dir_s):
        y_t = _shrink_into_disc(cap * u, cap)
        for lam in speeds:
            xs.append(np.array([0.0, lam * y_t[0], lam * y_t[1]]))
            ys.append(np.array([p, y_t[0], y_t[1]]))

    return GraphSample(np.array(xs), np.array(ys))


def sample_m0(params: CoulombParams, n: int = 20) -> GraphSample:
    """Sample of ``M_0 = {(x, 0) : x_n <= 0}``."""
    gaps = -np.linspace(0.0, 4.0, max(2, n // 4))
    slides = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, -2.0], [1.5, 1.5]])
    xs = [np.array([g, s[0], s[1]]) for g in gaps for s in slides]
    ys = [np.zeros(3) for _ in xs]
    return GraphSample(np.array(xs), np.array(ys))


def coulomb_cover(params: CoulombParams, p_max: float = 16.0, n_p: int = 64,
                  extra_pressures=(), include_infinity: bool = True,
                  target: GraphSample | None = None):
    """The pressure-indexed cover ``p -> b_p`` on a truncated, log-spaced
    pressure grid (plus ``p = 0`` and any exact pressures the caller needs
    the singleton indicators to hit).  The ``p = +inf`` member is +inf
    everywhere and contributes an empty critical set, by convention."""
    from .covers import CoverSpec

    ps = set(float(p) for p in np.geomspace(p_max / 256.0, p_max, n_p))
    ps.update(float(p) for p in extra_pressures)
    ps.add(0.0)
    finite = tuple(sorted(ps))
    parameters = finite + ((math.inf,) if include_infinity else ())

    members = [b_p_spec(p, params) for p in finite]
    if include_infinity:
        members.append(ClosedFormBipotential(
            fn=lambda x, y: math.inf, dim_x=3, dim_y=3, name="b_inf",
            matrix_fn=lambda X, Y: np.full((X.shape[0], Y.shape[0]), np.inf)))

    def paired(p, X, Y):
        if p == math.inf:
            return np.full(np.atleast_2d(X).shape[0], np.inf)
        return b_p_values(p, X, Y, params)

    if target is None:
        target = sample_graph(params)

    def membership(x, y):
        return classify(ContactPoint.from_vectors(x, y), params).in_graph

    return CoverSpec(parameters, tuple(members), target, membership, paired)


def stratified_probes(params: CoulombParams, n_target: int = 10_000,
                      seed: int = 0, p_max: float = 4.0
                      ) -> tuple[np.ndarray, np.ndarray]:
    """Probe couples mixing in-graph samples with off-graph perturbations.

    Off-graph probes violate their nearest branch by a margin of at
    least 1e-3, so the in/out decision is never a coin flip at floating
    precision.  Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    p_values = np.geomspace(0.25, p_max, 6)
    M = sample_graph(params, "all", p_values=tuple(p_values),
                     n_directions=10, n_radii=5, n_speeds=6)
    X = [M.xs]
    Y = [M.ys]
    n_off = max(0, n_target - M.size)

    mu = params.mu
    # perturbed copies of in-graph couples, pushed off each branch
    base_idx = rng.integers(0, M.size, size=n_off // 2)
    bx = M.xs[base_idx].copy()
    by = M.ys[base_idx].copy()
    kicks = rng.uniform(1e-3, 0.5, size=n_off // 2)
    mode = rng.integers(0, 3, size=n_off // 2)
    for k in range(bx.shape[0]):
        if mode[k] == 0:
            bx[k, 0] += kicks[k]          # positive gap velocity: leaves K_0*
        elif mode[k] == 1:
            by[k, 0] = -abs(by[k, 0]) - kicks[k]   # reaction below the cone
        else:
            # inflate the tangential reaction past the cone boundary
            cap = mu * max(by[k, 0], 0.0)
            u = by[k, 1:]
            nu = np.linalg.norm(u)
            d = u / nu if nu > 0 else np.array([1.0, 0.0])
            by[k, 1:] = d * (cap + kicks[k] + 1e-3)
    X.append(bx)
    Y.append(by)

    n_rand = n_off - bx.shape[0]
    rx = rng.uniform(-2.0, 2.0, size=(n_rand, 3))
    ry = rng.uniform(-2.0, 2.0, size=(n_rand, 3))
    X.append(rx)
    Y.append(ry)
    return np.vstack(X), np.vstack(Y)

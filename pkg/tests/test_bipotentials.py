import math

import numpy as np
import pytest

from bipot.bipotentials import (
    ClosedFormBipotential,
    CorollaryHypothesisError,
    MaxOfTwo,
    Separable,
    check_axioms,
    check_corollary33,
    check_strong,
    check_theorem31,
    critical_set,
    eval_bipotential,
    minimax_gap_identity,
    nonstrong_example,
)
from bipot.convex import PowerAbs, Quadratic, ScaledNorm
from bipot.core import INF, ExtReal
from bipot.grids import Grid

QUAD = Quadratic(np.array([[1.0]]))
QUART = PowerAbs(4.0, 0.25)
ABS = ScaledNorm(1.0, (0,), 1)
G4 = Grid.uniform(4.0, 801, 1)
G2 = Grid.uniform(2.0, 81, 1)


def shifted_down_quadratic():
    return ClosedFormBipotential(
        fn=lambda x, y: x[0] ** 2 / 2 + y[0] ** 2 / 2 - 10.0,
        dim_x=1, dim_y=1, name="gap_violator",
        matrix_fn=lambda X, Y: (X[:, 0] ** 2 / 2)[:, None]
        + (Y[:, 0] ** 2 / 2)[None, :] - 10.0)


# --------------------------------------------------------------- evaluation

def test_separable_quadratic_on_its_graph():
    b = Separable(QUAD)
    assert eval_bipotential(b, 1.0, 1.0) == ExtReal(1.0)


def test_nonstrong_example_at_origin():
    b = nonstrong_example()
    assert eval_bipotential(b, 0.0, 5.0) == ExtReal(0.0)


def test_max_of_two_takes_pointwise_max():
    b = MaxOfTwo(Separable(QUART), Separable(QUAD))
    # at (2, 0): max(4 + 0, 2 + 0) = 4
    assert eval_bipotential(b, 2.0, 0.0) == ExtReal(4.0)


# --------------------------------------------------------------- critical sets

def test_separable_critical_set_is_subdifferential_graph():
    cs = critical_set(Separable(QUAD), G2, G2, tol=1e-9)
    assert len(cs) == 81
    assert all(abs(x[0] - y[0]) < 1e-9 for x, y in cs.points)


def test_max_of_two_critical_points_exactly_three():
    b = MaxOfTwo(Separable(QUART), Separable(QUAD))
    g = Grid.uniform(2.0, 401, 1)
    cs = critical_set(b, g, g, tol=1e-9)
    got = sorted({(float(x[0]), float(y[0])) for x, y in cs.points})
    assert got == [(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0)]
    assert cs.intersection_consistent


def test_nonstrong_critical_set_is_the_axis():
    b = nonstrong_example()
    gy = Grid.from_axes(np.linspace(0.0, 40.0, 81))
    cs = critical_set(b, G2, gy, tol=1e-9)
    assert len(cs) == 81
    assert all(x[0] == 0.0 for x, _ in cs.points)


# --------------------------------------------------------------- axioms

def test_separable_passes_axioms():
    rep = check_axioms(Separable(QUAD), G2, G2)
    assert rep.passed
    assert float(rep.fenchel_gap_min) >= -1e-9
    assert len(rep.critical_points) == 81


def test_nonstrong_passes_axioms():
    gy = Grid.from_axes(np.linspace(-2.0, 40.0, 85))
    rep = check_axioms(nonstrong_example(), G2, gy)
    assert rep.passed
    assert rep.convex_in_x and rep.convex_in_y
    assert not rep.equivalence_failures
    assert rep.inconclusive_pairs > 0  # the unattained infimum tail


def test_negative_gap_fails_axiom_b():
    rep = check_axioms(shifted_down_quadratic(), G2, G2)
    assert not rep.passed
    assert float(rep.fenchel_gap_min) <= -10.0 + 1e-9


# --------------------------------------------------------------- strong check

def test_separable_is_strong():
    rep = check_strong(Separable(QUAD), G4, G4)
    assert rep.strong
    kinds = {c.kind for c in rep.b1s} | {c.kind for c in rep.b2s}
    assert kinds <= {"zero", "inf"}


def test_separable_abs_has_infinite_slices():
    rep = check_strong(Separable(ABS), G4, G4)
    assert rep.strong
    assert any(c.kind == "inf" for c in rep.b1s)  # y outside [-1, 1]


def test_nonstrong_b2s_violation_equals_abs_x():
    b = nonstrong_example()
    ys = Grid.from_axes(np.linspace(0.0, 40.0, 801))
    rep = check_strong(b, np.array([[0.5], [1.0], [2.0]]), ys.nodes, tol=0.01)
    got = [c.inf_value for c in rep.b2s]
    assert all(c.kind == "violation" for c in rep.b2s)
    assert np.allclose(got, [0.5, 1.0, 2.0], atol=0.01)
    sides = {v[0] for v in rep.violations}
    assert "B2S" in sides


# --------------------------------------------------------------- criterion

def test_theorem31_quartic_quadratic_not_strong():
    gy = Grid.uniform(64.0, 801, 1)
    rep = check_theorem31(QUART, QUAD, np.linspace(0, 1, 21), G4, gy, tol=0.01)
    assert not rep.ii_prime.holds
    assert not rep.strong.strong
    assert rep.consistent
    assert rep.exact_conjugates


def test_theorem31_identical_quadratics_strong():
    rep = check_theorem31(QUAD, QUAD, np.linspace(0, 1, 21), G4, G4, tol=0.01)
    assert rep.ii_prime.holds and rep.ii_second.holds
    assert rep.strong.strong and rep.consistent


def test_theorem31_gap_point_from_quadrature():
    # frozen oracle: at lam = 0.5, y = 2 the combined conjugate is
    # strictly below the weighted conjugates (independent fine search
    # puts the defect near 0.114); at y = 1 the two sides coincide.
    z = np.linspace(-4, 4, 2_000_001)
    combo = 0.5 * z ** 4 / 4 + 0.5 * z ** 2 / 2
    lhs2 = np.max(2 * z - combo)
    rhs2 = 0.5 * 0.75 * 2 ** (4 / 3) + 0.5 * 2.0
    assert rhs2 - lhs2 > 0.1
    lhs1 = np.max(1 * z - combo)
    assert abs(lhs1 - (0.5 * 0.75 + 0.5 * 0.5)) <= 1e-6


# --------------------------------------------------------------- minimax

def test_minimax_identical_quadratics():
    rep = minimax_gap_identity(QUAD, QUAD, 1.0, grid_x=G4)
    assert abs(rep.lhs) <= 1e-9 and abs(rep.rhs) <= 1e-9


def test_minimax_quartic_quadratic_at_two():
    rep = minimax_gap_identity(QUART, QUAD, 2.0,
                               lambda_grid=np.linspace(0, 1, 201), grid_x=G4)
    assert rep.gap <= 0.01
    # frozen from a 4e6-node quadrature sweep
    assert abs(rep.lhs - (-0.13349)) <= 2e-3
    assert rep.lhs < 0 and rep.rhs < 0


def test_minimax_rejects_y_outside_conjugate_domains():
    with pytest.raises(ValueError):
        minimax_gap_identity(ABS, ABS, 2.0, grid_x=G4)


# --------------------------------------------------------------- corollary

def test_corollary_identical_abs():
    rep = check_corollary33(ABS, ABS, 0.5, 0.0, tol=0.02, grid=G4)
    assert rep.equal
    assert abs(rep.lhs.lo + 1.0) <= 0.02 and abs(rep.lhs.hi - 1.0) <= 0.02
    assert (rep.rhs.lo, rep.rhs.hi) == (-1.0, 1.0)


def test_corollary_identical_quadratics_point_slope():
    rep = check_corollary33(QUAD, QUAD, 0.3, 1.0, tol=0.02, grid=G4)
    assert rep.equal
    assert abs(rep.rhs.lo - 1.0) <= 1e-12 and abs(rep.rhs.hi - 1.0) <= 1e-12


def test_corollary_refuses_unverified_hypothesis():
    with pytest.raises(CorollaryHypothesisError):
        check_corollary33(QUART, QUAD, 0.5, 0.5, grid=G4)


# --------------------------------------------------------------- properties

def test_strong_implies_axioms():
    gy = Grid.from_axes(np.linspace(-2.0, 40.0, 85))
    cases = [
        (Separable(QUAD), G2, G2),
        (Separable(ABS), G2, G2),
        (MaxOfTwo(Separable(QUAD), Separable(QUAD)), G2, G2),
    ]
    for b, gx, gyy in cases:
        strong = check_strong(b, gx, gyy)
        if strong.strong:
            assert check_axioms(b, gx, gyy).passed


def test_gap_nonnegative_for_axiom_passers():
    for b in (Separable(QUAD), Separable(ABS), nonstrong_example()):
        gy = Grid.from_axes(np.linspace(-2.0, 40.0, 43)) \
            if b.kind == "closed_form" else G2
        rep = check_axioms(b, G2, gy)
        if rep.passed:
            g = rep.fenchel_gap_min
            assert g.is_inf or float(g) >= -1e-9

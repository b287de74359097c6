import math

import numpy as np
import pytest

from bipot.bipotentials import check_strong, check_theorem31
from bipot.convex import closed_form_conjugate
from bipot.core import INF, ExtReal, pairing
from bipot.coulomb import (
    Classification,
    ContactKind,
    ContactPoint,
    CoulombParams,
    b_p,
    b_p_spec,
    b_p_values,
    classify,
    cone_membership,
    coulomb_bipotential,
    coulomb_cover,
    coulomb_spec,
    coulomb_values,
    potential_family,
    sample_graph,
    sample_m0,
    sample_mp,
    stratified_probes,
)
from bipot.covers import inf_bipotential, inf_paired_values
from bipot.graphs import (
    GraphSample,
    is_cyclically_monotone,
    is_monotone,
    rockafellar_dual_potential,
    rockafellar_potential,
)

PRM = CoulombParams(0.5)


# ------------------------------------------------------------- classification

def test_classify_separation():
    c = classify(ContactPoint(-1.0, (0.3, 0.0), 0.0, (0.0, 0.0)), PRM)
    assert c.kind is ContactKind.SEPARATION


def test_classify_sticking():
    # ||y_t|| = sqrt(0.73) ~ 0.854 <= mu y_n = 1
    c = classify(ContactPoint(0.0, (0.0, 0.0), 2.0, (0.8, 0.3)), PRM)
    assert c.kind is ContactKind.STICKING


def test_classify_sliding():
    c = classify(ContactPoint(0.0, (2.0, 0.0), 1.0, (0.5, 0.0)), PRM)
    assert c.kind is ContactKind.SLIDING
    assert np.allclose(c.slip_direction, [1.0, 0.0])


def test_classify_zero_pressure_slip_is_in_graph():
    # boundary meeting point of the branches, kept as the sliding limit
    c = classify(ContactPoint(0.0, (1.0, 0.0), 0.0, (0.0, 0.0)), PRM)
    assert c.kind is ContactKind.SLIDING


def test_classify_rejections():
    assert not classify(ContactPoint(1.0, (0.0, 0.0), 1.0, (0.0, 0.0)), PRM).in_graph
    assert not classify(ContactPoint(-1.0, (0.0, 0.0), 1.0, (0.0, 0.0)), PRM).in_graph
    # negative pressure cannot slide
    assert not classify(ContactPoint(0.0, (2.0, 0.0), -1.0, (-0.5, 0.0)), PRM).in_graph
    # sticking priority over sliding at x = 0
    c = classify(ContactPoint(0.0, (0.0, 0.0), 1.0, (0.5, 0.0)), PRM)
    assert c.kind is ContactKind.STICKING


# ------------------------------------------------------------- cones

def test_cone_memberships():
    assert cone_membership((2.0, 0.9, 0.0), "K_mu", PRM)
    assert not cone_membership((2.0, 1.1, 0.0), "K_mu", PRM)
    assert cone_membership((-2.0, 1.0, 0.0), "K_mu_star", PRM)
    assert not cone_membership((0.1, 0.0, 0.0), "K_mu_star", PRM)
    assert cone_membership((3.0, 0.0, 0.0), "K_0", PRM)
    assert not cone_membership((3.0, 0.1, 0.0), "K_0", PRM)
    assert cone_membership((-0.5, 7.0, -2.0), "K_0_star", PRM)
    assert not cone_membership((0.51, 0.0), "disc", PRM, p=1.0)
    assert cone_membership((0.5, 0.0), "disc", PRM, p=1.0)


# ------------------------------------------------------------- potentials

def test_potential_values():
    phi = potential_family(1.0, "phi", PRM)
    assert float(phi((-0.3, 2.0, 0.0))) == 0.7
    psis = potential_family(1.0, "psi_star", PRM)
    assert psis((0.1, 2.0, 0.0)) == INF
    assert float(psis((0.0, 2.0, 0.0))) == 1.0
    phi0 = potential_family(0.0, "phi", PRM)
    assert float(phi0((3.0, -1.0, 2.0))) == 0.0
    phi0s = potential_family(0.0, "phi_star", PRM)
    assert float(phi0s((0.0, 0.0, 0.0))) == 0.0
    assert phi0s((0.1, 0.0, 0.0)) == INF
    with pytest.raises(ValueError):
        potential_family(-1.0, "phi", PRM)


@pytest.mark.parametrize("p", [0.5, 1.0, 4.0])
def test_potentials_agree_with_conjugate_table(p):
    probes = np.array([
        [0.0, 0.0, 0.0], [0.0, 2.0, 0.0], [-0.3, 2.0, 0.0], [0.1, 1.0, 1.0],
        [p, 0.0, 0.0], [p, PRM.mu * p, 0.0], [p, 2 * PRM.mu * p, 0.0],
        [0.5 * p, 0.1, 0.0],
    ])
    phi = potential_family(p, "phi", PRM)
    phi_star = potential_family(p, "phi_star", PRM)
    table = closed_form_conjugate(phi)
    assert np.array_equal(table.values(probes), phi_star.values(probes))
    psi = potential_family(p, "psi", PRM)
    psi_star = potential_family(p, "psi_star", PRM)
    table2 = closed_form_conjugate(psi_star)
    assert np.array_equal(table2.values(probes), psi.values(probes))


def test_fenchel_equality_on_mp_sample():
    M = sample_mp(1.0, PRM, 40, 40)
    phi = potential_family(1.0, "phi", PRM)
    phi_star = potential_family(1.0, "phi_star", PRM)
    fx = phi.values(M.xs)
    gy = phi_star.values(M.ys)
    P = np.sum(M.xs * M.ys, axis=1)
    assert np.all(np.isfinite(fx)) and np.all(np.isfinite(gy))
    assert np.max(np.abs(fx + gy - P)) <= 1e-9


# ------------------------------------------------------------- b_p and b

def test_b_p_values():
    assert float(b_p(1.0, (0, 2, 0), (1, 0.5, 0), PRM)) == 1.0
    assert b_p(1.0, (0.1, 2, 0), (1, 0.5, 0), PRM) == INF
    assert float(b_p(0.0, (-1, 0, 0), (0, 0, 0), PRM)) == 0.0
    with pytest.raises(ValueError):
        b_p(-0.5, (0, 0, 0), (0, 0, 0), PRM)


@pytest.mark.parametrize("p", [0.0, 0.5, 1.0, 4.0])
def test_b_p_is_max_of_its_branches(p):
    spec = b_p_spec(p, PRM)
    X = np.array([[0, 2, 0], [0, 0, 0], [0.1, 2, 0], [-1, 0, 0], [0, -1, 3]],
                 dtype=float)
    Y = np.array([[p, 0.5 * PRM.mu * p, 0], [p, 0, 0], [0, 0, 0],
                  [p + 0.5, 0, 0], [p, PRM.mu * p, 0]], dtype=float)
    direct = np.array([[float(b_p(p, x, y, PRM)) for y in Y] for x in X])
    assert np.array_equal(spec.value_matrix(X, Y), direct)


def test_coulomb_bipotential_values():
    assert float(coulomb_bipotential((0, 2, 0), (1, 0.5, 0), PRM)) == 1.0
    assert pairing((0, 2, 0), (1, 0.5, 0)) == 1.0
    assert float(coulomb_bipotential((-1, 3, 0), (0, 0, 0), PRM)) == 0.0
    assert coulomb_bipotential((1, 0, 0), (0.5, 0.1, 0), PRM) == INF
    assert coulomb_bipotential((0, 0, 0), (1.0, 0.6, 0), PRM) == INF


def test_coulomb_spec_matches_paired_values():
    spec = coulomb_spec(PRM)
    X, Y = stratified_probes(PRM, 200, seed=5)
    paired = coulomb_values(X, Y, PRM)
    mat = spec.value_matrix(X, Y)
    assert np.array_equal(np.diag(mat), paired)


# ------------------------------------------------------------- samples

def test_sample_graph_branches_classify():
    for branch in ("separation", "sticking", "sliding", "all"):
        M = sample_graph(PRM, branch, p_values=(0.5, 1.0))
        for x, y in zip(M.xs, M.ys):
            assert classify(ContactPoint.from_vectors(x, y), PRM).in_graph


def test_sticking_samples_structure():
    M = sample_graph(PRM, "sticking", p_values=(1.0,))
    assert np.all(M.xs == 0.0)
    assert np.all(M.ys[:, 0] == 1.0)
    assert np.all(np.linalg.norm(M.ys[:, 1:], axis=1) <= PRM.mu * 1.0)


def test_sliding_samples_structure():
    M = sample_graph(PRM, "sliding", p_values=(1.0,))
    assert np.all(M.xs[:, 0] == 0.0)
    nyt = np.linalg.norm(M.ys[:, 1:], axis=1)
    assert np.max(np.abs(nyt - 0.5)) <= 1e-12
    # slip parallel to the tangential reaction with positive speed
    cross = M.xs[:, 1] * M.ys[:, 2] - M.xs[:, 2] * M.ys[:, 1]
    dot = np.sum(M.xs[:, 1:] * M.ys[:, 1:], axis=1)
    assert np.max(np.abs(cross)) <= 1e-12
    assert np.all(dot > 0)


def test_separation_samples_structure():
    M = sample_graph(PRM, "separation")
    assert np.all(M.xs[:, 0] < 0)
    assert np.all(M.ys == 0.0)


def test_m0_sample_in_graph_of_b():
    M = sample_m0(PRM)
    v = coulomb_values(M.xs, M.ys, PRM)
    P = np.sum(M.xs * M.ys, axis=1)
    assert np.array_equal(v, P)


# ------------------------------------------------------------- graph facts

def test_full_sample_not_monotone_with_witness():
    M = sample_graph(PRM)
    rep = is_monotone(M)
    assert not rep.monotone
    assert rep.worst < -1e-6


def test_mp_cyclically_monotone_but_extendable():
    M = sample_mp(1.0, PRM, 40, 30)
    assert is_cyclically_monotone(M, 3).cyclically_monotone
    other = sample_mp(2.0, PRM, 20, 15)
    # any foreign couple extends M_p while staying cyclically monotone
    for k in range(0, other.size, 7):
        aug = M.with_pair(other.xs[k], other.ys[k])
        assert is_cyclically_monotone(aug, 3).cyclically_monotone


def test_reconstructions_distinct_where_psi_star_is_infinite():
    M = sample_mp(1.0, PRM, 60, 60)
    x = (-0.3, 2.0, 0.0)
    direct = float(rockafellar_potential(M, (0, 0, 0), 0.0, x, 3))
    assert abs(direct - 0.7) <= 0.05   # phi_p is finite there
    # the conjugate of the dual reconstruction blows up off the x_n = 0
    # plane: its grid sup grows linearly with the probe-box radius
    psis = potential_family(1.0, "psi_star", PRM)
    assert psis(x) == INF
    sup1 = _dual_conjugate_estimate(M, x, radius=4.0)
    sup2 = _dual_conjugate_estimate(M, x, radius=8.0)
    assert sup2 > sup1 + 0.5


def _dual_conjugate_estimate(M, x, radius):
    ys = np.array([[yn, 0.3, 0.0] for yn in np.linspace(-radius, radius, 17)])
    vals = [float(rockafellar_dual_potential(M, M.ys[0], 0.0, y, 3)) for y in ys]
    xv = np.asarray(x)
    return max(float(xv @ y) - v for y, v in zip(ys, vals))


# ------------------------------------------------------------- cover facts

def test_cover_infimum_examples():
    cov = coulomb_cover(PRM, p_max=4.0, n_p=16, extra_pressures=(1.0,))
    assert float(inf_bipotential(cov, (0, 2, 0), (1, 0.5, 0))) == 1.0
    assert float(inf_bipotential(cov, (-1, 0, 0), (0, 0, 0))) == 0.0
    assert inf_bipotential(cov, (0, 1, 0), (1.0, 2.0, 0.0)) == INF


def test_cover_identity_on_its_validity_region():
    # the sampled infimum agrees with the closed form wherever the
    # construction actually reaches: the x_n = 0 plane, the zero
    # reaction, and everywhere both sides are infinite
    X, Y = stratified_probes(PRM, 3000, seed=2)
    cov = coulomb_cover(PRM, p_max=4.0, n_p=32,
                        extra_pressures=np.unique(Y[:, 0]))
    inf_vals = inf_paired_values(cov, X, Y)
    b_vals = coulomb_values(X, Y, PRM)
    reachable = (X[:, 0] == 0.0) | np.all(Y == 0.0, axis=1)
    agree = np.isclose(inf_vals, b_vals, atol=1e-9) | \
        (np.isinf(inf_vals) & np.isinf(b_vals))
    assert np.all(agree[reachable])
    both_inf_region = np.isinf(b_vals)
    assert np.all(np.isinf(inf_vals[both_inf_region]))


def test_cover_construction_gap_region_is_real():
    # the pressure-indexed members all carry ind(x_n = 0), so their
    # infimum is +inf at strictly separating velocities with a nonzero
    # admissible reaction, where the closed form stays finite
    cov = coulomb_cover(PRM, p_max=4.0, n_p=16, extra_pressures=(1.0,))
    x, y = (-1.0, 2.0, 0.0), (1.0, 0.4, 0.0)
    assert inf_bipotential(cov, x, y) == INF
    assert float(coulomb_bipotential(x, y, PRM)) == 1.0


# ------------------------------------------------------------- criterion

@pytest.mark.parametrize("p", [0.5, 1.0, 4.0])
def test_theorem31_for_contact_pair(p):
    mu = PRM.mu
    phi = potential_family(p, "phi", PRM)
    psi_star = potential_family(p, "psi_star", PRM)
    # primal probes on the x_n = 0 plane plus off-plane points
    ts = np.linspace(-2.0, 2.0, 9)
    Xn = np.array([[xn, a, b] for xn in (-1.0, 0.0, 1.0) for a in ts for b in ts])
    # dual probes: the disc at y_n = p (admissible) and off-pressure points
    rad = np.linspace(0.0, 1.0, 5) * mu * p
    ang = np.linspace(0.0, 2 * np.pi, 9, endpoint=False)
    disc = [[p, r * np.cos(t), r * np.sin(t)] for r in rad for t in ang]
    off = [[p + 0.5, 0.0, 0.0], [0.0, 0.1, 0.0], [p, 2 * mu * p, 0.0]]
    Yn = np.array(disc + off)
    rep = check_theorem31(phi, psi_star, np.linspace(0, 1, 11), Xn, Yn, tol=1e-6)
    assert rep.ii_prime.holds
    assert rep.ii_second.holds
    assert rep.strong.strong
    assert rep.consistent

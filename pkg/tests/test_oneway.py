"""Matrix correspondence and the one-way orthogonality probe."""

import math

import numpy as np
import pytest

from locce.tensor import StateVector, maximally_entangled
from locce.families import Ensemble, PartyLayout, bell_basis, parametric_basis
from locce.oneway import (
    MatrixRep,
    ResourceSpectrum,
    feasibility_search,
    orthogonality_residual,
    rk_structure_check,
    teleportation_certificate,
    to_matrix_rep,
)
from locce.oneway import _condition_operators, _objective

S2 = 1 / math.sqrt(2)


def computational_ensemble():
    layout = PartyLayout((("A", (0,)), ("B", (1,))))
    states = [StateVector((2, 2), np.eye(4)[i]) for i in range(4)]
    return Ensemble(layout, tuple((0.25, s) for s in states))


# -- matrix correspondence ----------------------------------------------------

def test_matrix_rep_examples():
    rep = to_matrix_rep(bell_basis())
    assert np.allclose(rep.matrices[0], np.eye(2))  # canonical MES -> identity
    comp = to_matrix_rep(computational_ensemble())
    assert np.allclose(comp.matrices[0], math.sqrt(2) * np.diag([1.0, 0.0]))
    par = to_matrix_rep(parametric_basis(0.9, 0.8))
    beta = math.sqrt(1 - 0.81)
    assert np.allclose(par.matrices[0], math.sqrt(2) * np.diag([0.9, beta]))


def test_matrix_rep_round_trip():
    phi = maximally_entangled(2)
    for ens in (bell_basis(), parametric_basis(0.85, 0.9), computational_ensemble()):
        rep = to_matrix_rep(ens)
        for m, st in zip(rep.matrices, ens.states):
            recon = np.kron(np.eye(2), m) @ phi
            assert np.linalg.norm(recon - st.amps) < 1e-9


def test_matrix_rep_trace_orthogonality():
    for ens in (bell_basis(), parametric_basis(0.8, 0.95)):
        rep = to_matrix_rep(ens)
        for i, a in enumerate(rep.matrices):
            for j, b in enumerate(rep.matrices):
                want = 2.0 if i == j else 0.0
                assert abs(np.trace(a.conj().T @ b) - want) < 1e-9


def test_cross_terms_linearly_independent_and_traceless():
    # with a full-rank first member, {M_1^dag M_j} spans the traceless space
    for ens in (bell_basis(), parametric_basis(0.9, 0.8)):
        rep = to_matrix_rep(ens)
        m1 = rep.matrices[0]
        cross = [m1.conj().T @ mj for mj in rep.matrices[1:]]
        for c in cross:
            assert abs(np.trace(c)) < 1e-9
        stack = np.stack([c.reshape(-1) for c in cross])
        assert np.linalg.matrix_rank(stack) == 3


def test_matrix_rep_requires_equal_local_dims():
    layout = PartyLayout((("A", (0,)), ("B", (1, 2))))
    st = StateVector((2, 2, 2), np.eye(8)[0])
    ens = Ensemble(layout, ((1.0, st),))
    with pytest.raises(ValueError):
        to_matrix_rep(ens)


# -- residual -----------------------------------------------------------------

def test_certificate_solves_mes_case():
    rep = to_matrix_rep(bell_basis())
    phis, weights = teleportation_certificate(2)
    res = orthogonality_residual(rep, ResourceSpectrum([1.0, 1.0]), phis, weights)
    assert res < 1e-9


def test_certificate_fails_for_skewed_spectrum():
    rep = to_matrix_rep(bell_basis())
    phis, weights = teleportation_certificate(2)
    res = orthogonality_residual(rep, ResourceSpectrum([1.6, 0.4]), phis, weights)
    assert res > 1e-2


def test_computational_products_solve_any_spectrum():
    # rank-one members void the full-rank premise; products satisfy the system
    rep = to_matrix_rep(computational_ensemble())
    eye = np.eye(2)
    phis = [np.kron(eye[a], eye[b]) for a in range(2) for b in range(2)]
    res = orthogonality_residual(rep, ResourceSpectrum([1.6, 0.4]), phis, [1.0] * 4)
    assert res < 1e-12


def test_residual_single_member_is_completeness_only():
    layout = PartyLayout((("A", (0,)), ("B", (1,))))
    ens = Ensemble(layout, ((1.0, bell_basis().states[0]),))
    rep = to_matrix_rep(ens)
    phi = np.zeros(4)
    phi[0] = 1.0
    res = orthogonality_residual(rep, ResourceSpectrum([1.0, 1.0]), [phi], [1.0])
    # || |0><0| - I ||_F^2 = 3
    assert res == pytest.approx(3.0)


def test_residual_weight_validation():
    rep = to_matrix_rep(bell_basis())
    phis, _ = teleportation_certificate(2)
    with pytest.raises(ValueError):
        orthogonality_residual(rep, ResourceSpectrum([1.0, 1.0]), phis, [1.0, -1.0, 1.0, 1.0])


def test_residual_invariant_under_second_factor_rotation():
    rng = np.random.default_rng(59)
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    u, _ = np.linalg.qr(z)
    rep = to_matrix_rep(bell_basis())
    rotated = MatrixRep(2, tuple(m @ u.conj().T for m in rep.matrices))
    spectrum = ResourceSpectrum([1.2, 0.8])
    phis, weights = teleportation_certificate(2)
    base = orthogonality_residual(rep, spectrum, phis, weights)
    moved = [np.kron(np.eye(2), u) @ p for p in phis]
    assert orthogonality_residual(rotated, spectrum, moved, weights) == pytest.approx(
        base, abs=1e-9)


# -- descent ------------------------------------------------------------------

def test_objective_gradient_finite_difference():
    rng = np.random.default_rng(61)
    rep = to_matrix_rep(bell_basis())
    ops = _condition_operators(rep, ResourceSpectrum([1.3, 0.7]))
    k, n = 5, 4
    theta = rng.standard_normal(2 * k * n)
    _, grad = _objective(theta, ops, k, n)
    eps = 1e-6
    for i in rng.choice(theta.size, size=12, replace=False):
        up = theta.copy()
        up[i] += eps
        down = theta.copy()
        down[i] -= eps
        num = (_objective(up, ops, k, n)[0] - _objective(down, ops, k, n)[0]) / (2 * eps)
        assert abs(num - grad[i]) < 1e-6


def test_search_finds_mes_solution():
    rep = to_matrix_rep(bell_basis())
    result = feasibility_search(rep, ResourceSpectrum([1.0, 1.0]),
                                outcomes=4, restarts=8, seed=2)
    assert result.best_residual < 1e-6
    # the reported configuration reproduces the residual
    check = orthogonality_residual(rep, ResourceSpectrum([1.0, 1.0]),
                                   result.phis, result.weights)
    assert check == pytest.approx(result.best_residual, abs=1e-9)


def test_search_skewed_spectrum_floor():
    rep = to_matrix_rep(bell_basis())
    result = feasibility_search(rep, ResourceSpectrum([1.6, 0.4]),
                                outcomes=4, restarts=10, seed=2)
    assert result.best_residual > 1e-2


def test_search_deterministic_given_seed():
    rep = to_matrix_rep(bell_basis())
    a = feasibility_search(rep, ResourceSpectrum([1.6, 0.4]), outcomes=4,
                           restarts=3, seed=9)
    b = feasibility_search(rep, ResourceSpectrum([1.6, 0.4]), outcomes=4,
                           restarts=3, seed=9)
    assert a.best_residual == b.best_residual
    assert a.best_restart == b.best_restart
    for pa, pb in zip(a.phis, b.phis):
        assert np.array_equal(pa, pb)


def test_search_validates_outcome_count():
    rep = to_matrix_rep(bell_basis())
    with pytest.raises(ValueError):
        feasibility_search(rep, ResourceSpectrum([1.0, 1.0]), outcomes=3,
                           restarts=1, seed=0)


def test_search_report_fields():
    rep = to_matrix_rep(bell_basis())
    result = feasibility_search(rep, ResourceSpectrum([1.0, 1.0]), outcomes=4,
                                restarts=2, seed=5)
    record = result.to_dict()
    assert record["outcomes"] == 4
    assert record["restarts"] == 2
    assert record["seed"] == 5
    assert record["wall_time_s"] > 0


# -- R-matrix structure -------------------------------------------------------

def test_rk_structure_certificate_is_identity_multiple():
    rep = to_matrix_rep(bell_basis())
    phis, _ = teleportation_certificate(2)
    for phi in phis:
        report = rk_structure_check(rep, ResourceSpectrum([1.0, 1.0]), phi)
        assert report.distance < 1e-9
        assert report.is_identity_multiple


def test_rk_structure_mes_state_with_skewed_spectrum():
    rep = to_matrix_rep(bell_basis())
    report = rk_structure_check(rep, ResourceSpectrum([1.6, 0.4]),
                                maximally_entangled(2))
    assert report.distance == pytest.approx(
        np.linalg.norm(np.diag([1.6, 0.4]) - np.eye(2)))
    assert not report.is_identity_multiple


def test_rk_structure_random_states_generically_off():
    rng = np.random.default_rng(67)
    rep = to_matrix_rep(bell_basis())
    spectrum = ResourceSpectrum([1.4, 0.6])
    for _ in range(5):
        z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        report = rk_structure_check(rep, spectrum, z / np.linalg.norm(z))
        assert report.distance > 1e-6


def test_rk_structure_needs_full_rank_first_member():
    rep = to_matrix_rep(computational_ensemble())
    with pytest.raises(ValueError, match="singular"):
        rk_structure_check(rep, ResourceSpectrum([1.0, 1.0]), maximally_entangled(2))


def test_resource_spectrum_validation():
    with pytest.raises(ValueError):
        ResourceSpectrum([1.0, 0.5])  # sums to 1.5, not d=2
    with pytest.raises(ValueError):
        ResourceSpectrum([2.5, -0.5])

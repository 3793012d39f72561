import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as ora
from conftest import dense
from fockmetro import bayes_estimation as be
from fockmetro import fock_core as fc
from fockmetro import freq_estimation as fe
from fockmetro.errors import IllDefinedEstimatorError, UndefinedConditioningError, ValidationError

ALPHA_BETA = [(0.3, 0.5), (0.0, 1.0), (0.6, 0.2)]


def master_basis_matrix(op, N):
    b = [fc.FockIndex(0, 0), fc.FockIndex(0, N), fc.FockIndex(N, 0), fc.FockIndex(N, N)]
    return op.on_basis(b)


# -- priors -----------------------------------------------------------------

def test_flat_prior_moments():
    assert be.prior_moments(be.Prior.flat(1.0)) == (0.0, 1 / 12)
    mean, var = be.prior_moments(be.Prior.flat(1.0, center=0.5))
    assert mean == 0.5 and var == pytest.approx(1 / 12, abs=1e-15)


def test_triangular_prior_moments():
    prior = be.Prior.tabulated([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0])
    mean, var = be.prior_moments(prior)
    assert mean == pytest.approx(0.0, abs=1e-14)
    assert var == pytest.approx(1 / 6, abs=1e-12)


def test_tabulated_prior_is_normalised():
    prior = be.Prior.tabulated([0.0, 0.5, 1.0, 1.5], [2.0, 4.0, 4.0, 0.0])
    x, w = prior.quadrature()
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert prior.density(0.5) == pytest.approx(4.0 / 4.5)


@pytest.mark.parametrize("make", [
    lambda: be.Prior.flat(0.0), lambda: be.Prior.flat(-1.0), lambda: be.Prior.flat(1.0, nodes=1),
    lambda: be.Prior.tabulated([0.0, 1.0], [0.0, 0.0]),
    lambda: be.Prior.tabulated([1.0, 0.0], [1.0, 1.0]),
    lambda: be.Prior.flat(float("inf")),
])
def test_invalid_priors(make):
    with pytest.raises(ValidationError):
        make()


def test_wide_prior_is_a_warning(caplog):
    prior = be.Prior.flat(2.5)
    assert prior.wide and not be.Prior.flat(2.0).wide
    with caplog.at_level(logging.WARNING, logger="fockmetro"):
        res = be.metrological_power(fc.Noon(1), prior)
    assert res.wide_prior and "wide_prior" in res.flags
    assert any("exceeds" in r.message for r in caplog.records)
    assert res.P == pytest.approx(be.closed_form_P(1, 0, 1, 2.5), abs=1e-9)


# -- averaged operators -----------------------------------------------------

@pytest.mark.parametrize("alpha,beta", ALPHA_BETA)
@pytest.mark.parametrize("sign", [1, -1])
def test_master_averages_closed_form(alpha, beta, sign):
    N, W = 3, 0.8
    r, r1 = be.averaged_states(fc.MasterState(N, alpha, beta), be.Prior.flat(W), sign=sign)
    cr, cr1, _ = be.closed_form_averages(N, alpha, beta, W, sign=sign)
    assert np.allclose(master_basis_matrix(r, N), cr, atol=1e-13)
    assert np.allclose(master_basis_matrix(r1, N), cr1, atol=1e-13)


def test_averages_against_midpoint_oracle():
    N, W = 2, 1.3
    rho = fc.make_state(fc.RhoONN(N, 0.7))
    r, r1 = be.averaged_states(rho, be.Prior.flat(W))
    o0, o1 = ora.flat_prior_average(dense(rho), N, W)
    assert np.allclose(dense(r, N), o0, atol=1e-6)
    assert np.allclose(dense(r1, N), o1, atol=1e-6)
    assert r.trace() == pytest.approx(1.0, abs=1e-12)


def test_phase_independent_state_averages():
    nn = fc.make_state(fc.Custom(amplitudes={(2, 2): 1}))
    r, r1 = be.averaged_states(nn, be.Prior.flat(1.0))
    assert np.allclose(r.matrix, fc.to_density(nn).matrix)
    assert np.allclose(r1.matrix, 0.0, atol=1e-15)


def test_narrow_prior_first_moment_linearises():
    rho = fc.make_state(fc.RhoONs(2, 0.9))
    mean, W = 0.3, 1e-3
    prior = be.Prior.flat(W, center=mean)
    _, r1 = be.averaged_states(rho, prior)
    var = W**2 / 12
    expected = var * fe.phase_derivative(rho, mean).matrix + mean * fc.encode_phase(rho, mean).matrix
    assert np.allclose(r1.matrix, expected, atol=1e-10)


# -- estimator --------------------------------------------------------------

@pytest.mark.parametrize("N", [1, 2, 5])
@pytest.mark.parametrize("W", [0.1, 1.0, 2.0])
def test_estimator_universal_and_closed_form(N, W):
    prior = be.Prior.flat(W)
    ref = be.closed_form_estimator(N, W)
    for alpha, beta in ALPHA_BETA:
        S = be.metrological_power(fc.MasterState(N, alpha, beta), prior).S
        assert np.allclose(master_basis_matrix(S, N), master_basis_matrix(ref, N), atol=1e-8)


def test_estimator_literal_form_in_opposite_convention():
    N, W = 2, 1.0
    S = be.metrological_power(fc.MasterState(N, 0.3, 0.5), be.Prior.flat(W), sign=+1).S
    c = 1j * (N * W * math.cos(N * W / 2) - 2 * math.sin(N * W / 2)) / (N**2 * W)
    assert S.entry((0, N), (N, 0)) == pytest.approx(c, abs=1e-12)
    assert S.entry((N, 0), (0, N)) == pytest.approx(-c, abs=1e-12)


def test_estimator_same_for_noon_and_rho_ons():
    prior = be.Prior.flat(1.0)
    a = be.metrological_power(fc.RhoONs(2, 0.7), prior).S
    b = be.metrological_power(fc.Noon(2), prior).S
    basis = fc.union_basis(a.basis, b.basis)
    assert np.allclose(a.on_basis(basis), b.on_basis(basis), atol=1e-10)


def test_estimator_of_phase_independent_state():
    res = be.metrological_power(fc.Custom(amplitudes={(1, 1): 1}), be.Prior.flat(1.0, center=0.4))
    assert np.allclose(res.S.matrix, 0.4 * np.eye(res.S.dim))
    assert res.P == pytest.approx(0.0, abs=1e-15)
    assert res.optimal_error == pytest.approx(1 / 12, abs=1e-15)


def test_estimator_solves_its_equation():
    prior = be.Prior.flat(0.9)
    r, r1 = be.averaged_states(fc.PsiONN(2, 0.6), prior)
    S = be.personick_estimator(r, r1).matrix
    assert np.allclose(S @ r.matrix + r.matrix @ S, 2 * r1.matrix, atol=1e-12)


def test_estimator_leak_raises():
    r, r1 = be.averaged_states(fc.RhoONs(2, 0.7), be.Prior.flat(1.0))
    with pytest.raises(IllDefinedEstimatorError):
        be.personick_estimator(r, r1, eps_support=0.9)


def test_estimates_are_eigenvalues():
    N, W = 2, 1.0
    res = be.metrological_power(fc.Noon(N), be.Prior.flat(W))
    c = abs((N * W * math.cos(N * W / 2) - 2 * math.sin(N * W / 2)) / (N**2 * W))
    assert np.allclose(np.sort(res.estimates), [-c, c], atol=1e-12)
    vals, vecs = res.measurement()
    assert np.allclose(vecs @ np.diag(vals) @ vecs.conj().T, res.S.matrix)


# -- metrological power -----------------------------------------------------

@pytest.mark.parametrize("N", [1, 2, 3, 6])
@pytest.mark.parametrize("W", [0.1, 0.5, 1.0, 2.0])
def test_power_closed_forms(N, W):
    prior = be.Prior.flat(W)
    k = be.kappa(N * W / 2)
    assert be.metrological_power(fc.Noon(N), prior).P == pytest.approx(k * N**2, abs=1e-6)
    eta = 0.6
    beta = 2 * eta**2 / (1 + eta**2) ** 2
    assert be.metrological_power(fc.RhoONs(N, eta), prior).P == pytest.approx(k * beta * N**2, abs=1e-6)


def test_power_example_values():
    P = be.metrological_power(fc.Noon(2), be.Prior.flat(1.0)).P
    assert P == pytest.approx(4 * 9 * (math.cos(1) - math.sin(1)) ** 2, abs=1e-12)
    assert P / 4 == pytest.approx(be.kappa(1.0), abs=1e-12)


@pytest.mark.parametrize("spec", [fc.Noon(3), fc.RhoONs(2, 0.5), fc.RhoONN(4, 1.1), fc.PsiONN(2, 0.8),
                                  fc.MasterState(3, 0.1, 0.6), fc.VacuumFockSquared(2, 0.4)])
@pytest.mark.parametrize("W", [0.3, 1.5])
def test_power_identities(spec, W):
    res = be.metrological_power(spec, be.Prior.flat(W))
    assert 0 <= res.P <= 1 / res.sigma0_sq + 1e-9
    assert res.optimal_error == pytest.approx(res.sigma0_sq * (1 - res.sigma0_sq * res.P), abs=1e-10)
    assert "estimator_mean_mismatch" not in res.flags
    r, _ = be.averaged_states(spec, be.Prior.flat(W))
    assert abs(np.trace(r.matrix @ res.S.matrix)) <= 1e-10


@pytest.mark.parametrize("spec", [fc.Noon(2), fc.RhoONs(3, 0.5), fc.PsiONN(2, 1.3)])
def test_power_translation_invariant(spec):
    a = be.metrological_power(spec, be.Prior.flat(0.7))
    b = be.metrological_power(spec, be.Prior.flat(0.7, center=1.2))
    assert b.P == pytest.approx(a.P, abs=1e-9)
    assert b.prior_mean == pytest.approx(1.2)


@pytest.mark.parametrize("spec", [fc.Noon(2), fc.Noon(5), fc.RhoONs(3, 0.5), fc.RhoONN(2, 1.4),
                                  fc.MasterState(4, 0.2, 0.3), fc.PsiONN(3, 0.7)])
def test_narrow_prior_recovers_qfi(spec):
    W = 1e-2
    P = be.metrological_power(spec, be.Prior.flat(W)).P
    F = fe.qfi(fc.make_state(spec)).value
    assert abs(P / F - 1) <= (spec.N * W / 2) ** 2 * 0.25 + 1e-6


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), W=st.floats(0.05, 3.0))
def test_power_bounds_random_states(seed, W):
    g = np.random.default_rng(seed)
    n_max = int(g.integers(1, 4))
    v = ora.random_pure(g, n_max)
    amps = {i: a for i, a in zip(ora.basis(n_max), v) if abs(a) > 0}
    res = be.metrological_power(fc.Custom(amplitudes=amps, n_max=n_max), be.Prior.flat(W, nodes=120))
    assert -1e-9 <= res.P <= 12 / W**2 + 1e-9


def test_tabulated_prior_power_matches_flat():
    W = 0.8
    xs = np.linspace(-W / 2, W / 2, 9)
    tab = be.Prior.tabulated(xs, np.ones_like(xs))
    assert be.metrological_power(fc.Noon(3), tab).P == pytest.approx(
        be.metrological_power(fc.Noon(3), be.Prior.flat(W)).P, abs=1e-9)


# -- kappa and closed forms -------------------------------------------------

def test_kappa_values():
    assert be.kappa(0.0) == 1.0
    assert be.kappa(1.0) == pytest.approx(9 * (math.cos(1) - math.sin(1)) ** 2, abs=1e-15)
    grid = np.linspace(0, 50, 5001)
    vals = np.array([be.kappa(x) for x in grid])
    assert vals.min() >= 0 and vals.max() <= 1


def test_kappa_series_branch_is_continuous():
    x = be.KAPPA_SWITCH
    lo, hi = be.kappa(x * (1 - 1e-9)), be.kappa(x * (1 + 1e-9))
    assert abs(lo - hi) < 1e-8
    assert be.kappa(1e-4) == pytest.approx(1 - 1e-8 / 5, abs=1e-15)
    assert be.kappa(-0.5) == be.kappa(0.5)


def test_closed_form_p():
    assert be.closed_form_P(3, 0.2, 0.0, 1.0) == 0.0
    assert be.closed_form_P(3, 0.0, 0.5, 1.0) == be.closed_form_P(3, 0.5, 0.5, 1.0)
    assert be.closed_form_P(2, 0.0, 1.0, 1.0) == pytest.approx(4 * be.kappa(1.0))
    with pytest.raises(ValidationError):
        be.closed_form_P(2, 0.7, 0.5, 1.0)


def test_conditioned_power():
    N, eta, prior = 3, 0.8, be.Prior.flat(1.0)
    noon = be.metrological_power(fc.Noon(N), prior).P
    assert be.conditioned_power(fc.RhoONN(N, eta), prior) == pytest.approx(noon, abs=1e-9)
    assert be.conditioned_power(fc.RhoONs(N, eta), prior) == pytest.approx(noon / (1 + eta**2 / 2), abs=1e-9)
    assert be.conditioned_power(fc.Noon(N), prior) == pytest.approx(noon, abs=1e-12)
    with pytest.raises(UndefinedConditioningError):
        be.conditioned_power(fc.Custom(amplitudes={(0, 0): 1}), prior)


@pytest.mark.parametrize("N", [2, 4])
@pytest.mark.parametrize("eta", [0.1, 1.0, 2.0])
def test_vacuum_fock_scaling_limits(N, eta):
    W = 0.7
    spec = fc.RhoONs(N, eta)
    P = be.metrological_power(spec, be.Prior.flat(W)).P
    k = be.kappa(N * W / 2)
    nbar = 2 * eta**2 * N / (1 + eta**2)
    assert P <= k * nbar * N + 1e-9
    assert P / fc.mean_total_number_squared(fc.make_state(spec)) == pytest.approx(k / (1 + 2 * eta**2), abs=1e-9)


def test_bayes_result_serialises():
    res = be.metrological_power(fc.Noon(2), be.Prior.flat(1.0))
    d = res.to_dict(include_operator=True)
    assert set(d) >= {"P", "optimal_error", "sigma0_sq", "wide_prior_flag", "S", "estimates"}
    assert d["wide_prior_flag"] is False

import json

import numpy as np
import pytest

from besselbvp.core import Order, RadialGrid, GridFunction
from besselbvp.errors import IncompleteModeInput
from besselbvp.modes import (
    ModeSource,
    completeness_check,
    dirichlet_spectrum,
    embedding_singular_values,
    modeset_to_json,
    pencil_modes,
)
from besselbvp.solve import BesselOperator, operator_residual
from besselbvp.special import bessel_zeros
from besselbvp.symbols import BoundaryOperator

import scipy.special as ss


def laplace_pencil(nu):
    return BesselOperator(Order(nu), a_coeff=0.0,
                          pencil_fourier=lambda q: (float(np.dot(q, q)),
                                                    0.0, 1.0))


# --------------------------------------------------------------------------
# Dirichlet spectrum
# --------------------------------------------------------------------------

def test_dirichlet_spectrum_half_order_closed_form():
    ms = dirichlet_spectrum(0.5, q_max=0, n_max=3, n_nodes=256)
    want = 1.0 + np.pi ** 2 * np.arange(1, 4) ** 2
    assert np.allclose(ms.eigenvalues, want, rtol=1e-9)
    assert np.allclose(ms.closed_form, want, rtol=1e-12)


def test_dirichlet_spectrum_discrepancy_reported():
    ms = dirichlet_spectrum(0.3, q_max=0, n_max=1, n_nodes=256)
    j1 = bessel_zeros(0.3, 1).zeros[0]
    assert abs(ms.eigenvalues[0] - (1 + j1 ** 2)) / (1 + j1 ** 2) < 1e-6
    assert ms.discrepancy[0] < 1e-6
    assert np.all(ms.residuals < 1e-7)


def test_dirichlet_spectrum_with_tangential_modes():
    ms = dirichlet_spectrum(0.4, q_max=2, n_max=2, n_nodes=160)
    j = bessel_zeros(0.4, 2).zeros
    want = sorted(1.0 + q * q + j[n] ** 2
                  for q in range(-2, 3) for n in range(2))
    assert np.allclose(np.sort(ms.eigenvalues), want, rtol=1e-6)
    assert np.all(np.diff(np.abs(ms.eigenvalues)) > -1e-12)


def test_dirichlet_eigenfunction_satisfies_ode():
    nu = 0.6
    j1 = bessel_zeros(nu, 1).zeros[0]
    grid = RadialGrid.uniform(1.0, 1024)
    u = GridFunction(grid, np.sqrt(grid.nodes) * ss.jv(nu, j1 * grid.nodes))
    assert operator_residual(u, nu, -j1 ** 2) < 1e-7


def test_modeset_json():
    ms = dirichlet_spectrum(0.5, q_max=0, n_max=2, n_nodes=128)
    body = json.loads(modeset_to_json(ms))
    assert body["nu"] == 0.5
    assert len(body["eigenvalues"]) == 2
    assert "closed_form" in body


# --------------------------------------------------------------------------
# quadratic pencils
# --------------------------------------------------------------------------

def test_pencil_dirichlet_matches_zero_table():
    nu = 0.4
    ms = pencil_modes(nu, laplace_pencil(nu), None, q=0, n_nodes=256)
    assert ms.source is ModeSource.QUADRATIC_PENCIL
    jz = bessel_zeros(nu, 8).zeros
    lam = ms.eigenvalues[:16]
    for k in range(8):
        pair = lam[2 * k:2 * k + 2]
        assert abs(abs(pair[0].imag) - jz[k]) / jz[k] < 1e-6
        assert abs(pair[0] + pair[1]) < 1e-8 * jz[k]   # +- pairing
        assert abs(pair[0].real) < 1e-8 * jz[k]
    assert np.all(ms.residuals < 1e-7)


def test_even_pencil_spectrum_symmetry():
    nu = 0.7
    ms = pencil_modes(nu, laplace_pencil(nu), None, q=0, n_nodes=128)
    lam = ms.eigenvalues[np.isfinite(ms.eigenvalues)]
    lam = lam[np.abs(lam) < 100]
    spec = set(np.round(lam, 6))
    for l in lam:
        assert np.round(-l, 6) in spec


def test_pencil_eigenvalue_count_with_multiplicity():
    nu = 0.5
    ms = pencil_modes(nu, laplace_pencil(nu), None, q=0, n_nodes=64,
                      residual_cap=None)
    assert len(ms.eigenvalues) == 2 * ms.dof


def test_pencil_lambda_robin_regression():
    # residual-certified fixtures; no external truth claimed
    nu = 0.7
    bc = BoundaryOperator.lambda_robin(nu)
    ms = pencil_modes(nu, laplace_pencil(nu), bc, q=0, n_nodes=256)
    assert np.all(ms.residuals < 1e-7)
    lam = ms.eigenvalues[:4]
    want = [0.4803985 - 1.09678936j, 0.4803985 + 1.09678936j,
            0.25751747 - 4.32747309j, 0.25751747 + 4.32747309j]
    for w in want:
        assert np.min(np.abs(lam - w)) < 1e-6 * abs(w)


def test_self_adjoint_spectrum_real():
    # linear eigenproblem of Delta_nu + 1: eigenvalues real to 1e-9
    ms = dirichlet_spectrum(0.75, q_max=0, n_max=10, n_nodes=256)
    assert np.max(np.abs(np.imag(ms.eigenvalues))) < 1e-9


# --------------------------------------------------------------------------
# completeness
# --------------------------------------------------------------------------

def test_completeness_dirichlet_pencil_dof32():
    nu = 0.4
    ms = pencil_modes(nu, laplace_pencil(nu), None, q=0, n_nodes=32,
                      residual_cap=None)
    rep = completeness_check(ms)
    assert rep.verdict
    assert rep.numerical_rank == rep.ambient_dim == 2 * ms.dof
    assert "surrogate" in rep.note


def test_completeness_fails_on_truncated_modes():
    nu = 0.4
    ms = pencil_modes(nu, laplace_pencil(nu), None, q=0, n_nodes=32,
                      residual_cap=None)
    half = ms.cauchy_data[:, : ms.cauchy_data.shape[1] // 2]
    import dataclasses
    truncated = dataclasses.replace(ms, cauchy_data=half)
    with pytest.raises(IncompleteModeInput):
        completeness_check(truncated)
    # with enough columns but spanning only half the space: verdict false
    doubled = np.concatenate([half, half], axis=1)
    padded = dataclasses.replace(ms, cauchy_data=doubled)
    rep = completeness_check(padded)
    assert not rep.verdict


def test_completeness_lambda_robin_constraint_subspace():
    nu = 0.7
    bc = BoundaryOperator.lambda_robin(nu)
    ms = pencil_modes(nu, laplace_pencil(nu), bc, q=0, n_nodes=32,
                      residual_cap=None)
    rep = completeness_check(ms)
    assert rep.ambient_dim == 2 * ms.dof - 1
    assert rep.verdict


# --------------------------------------------------------------------------
# embedding singular values
# --------------------------------------------------------------------------

def test_embedding_half_order_closed_form():
    rep = embedding_singular_values(0.5, dof=32)
    want = 1.0 / np.sqrt(1.0 + np.pi ** 2 * np.arange(1, 33) ** 2)
    # leading block is spectrally resolved; the tail carries the usual
    # discrete overshoot but stays within a couple of percent
    assert np.allclose(rep.s[:8], want[:8], rtol=1e-7)
    assert np.allclose(rep.s, want, rtol=2e-2)


def test_embedding_exponent_in_range():
    rep = embedding_singular_values(0.3, dof=64)
    assert -1.1 <= rep.fitted_exponent <= -0.9
    assert np.all(np.diff(rep.s) < 0)


def test_embedding_monotone_and_positive():
    rep = embedding_singular_values(1.5, dof=48)
    assert np.all(rep.s > 0)
    assert np.all(np.diff(rep.s) < 0)

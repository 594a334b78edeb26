import math

import numpy as np
import pytest

import ifrk


def test_schemes_and_tableau_info():
    assert ifrk.schemes() == ["IF1", "IFRK2", "IFRK3", "IFRK4", "IFRK3_SHUOSHER"]
    info = ifrk.tableau_info("IFRK4")
    assert info["C_minus"] == "2/3"
    assert info["validation"]["mbp_admissible"]
    assert info["tau_max"] >= 0.08
    assert not ifrk.tableau_info("IFRK3_SHUOSHER")["validation"]["nondecreasing_abscissas"]


def test_reaction_terms():
    fh = ifrk.ReactionTerm.flory_huggins(0.8, 1.6)
    assert abs(fh.rho - 0.9575) < 5e-5
    assert fh.omega_minus == 1.25
    assert abs(fh.f(fh.rho)) < 1e-10
    vals = ifrk.ReactionTerm.cubic().f(np.array([0.0, 0.5, 1.0]))
    np.testing.assert_allclose(vals, [0.0, 0.375, 0.0])
    assert math.isnan(fh.f(1.5))


def test_operator_eigenvalues_and_exponential():
    op = ifrk.LinearOperator.periodic_laplacian(ifrk.Grid(1, 4, 0.25), 1.0)
    np.testing.assert_allclose(op.eigenvalues(), [0, -32, -64, -32], atol=1e-12)

    grid = ifrk.Grid.unit(2, 8)
    op = ifrk.LinearOperator.periodic_laplacian(grid, 0.05)
    u = np.random.default_rng(0).uniform(-1, 1, (8, 8))
    from scipy.linalg import expm

    ref = expm(0.3 * op.to_dense()) @ u.ravel()
    np.testing.assert_allclose(op.exp(u, 0.3).ravel(), ref, atol=1e-12)
    assert op.exp(u, 0.3).shape == (8, 8)


def test_stepper_preserves_bound():
    grid = ifrk.Grid.unit(2, 32)
    op = ifrk.LinearOperator.periodic_laplacian(grid, 0.01)
    term = ifrk.ReactionTerm.flory_huggins()
    u0 = np.random.default_rng(1).uniform(-0.8, 0.8, (32, 32))
    st = ifrk.Stepper(op, term, "IFRK4", 0.08, enforce_mbp=True)
    final, series = st.integrate(u0, 2.0, record_every=5)
    assert series["status"] == "completed"
    assert all(series["mbp_ok"])
    assert max(series["sup_norm"]) <= term.rho * (1 + 1e-12)
    assert final.shape == (32, 32)
    assert ifrk.sup_norm(final) == series["sup_norm"][-1]


def test_errors_are_python_exceptions():
    grid = ifrk.Grid.unit(1, 8)
    op = ifrk.LinearOperator.periodic_laplacian(grid, 0.01)
    term = ifrk.ReactionTerm.flory_huggins()
    with pytest.raises(ifrk.StepRefused):
        ifrk.Stepper(op, term, "IFRK3_SHUOSHER", 0.001, enforce_mbp=True)
    with pytest.raises(ifrk.ConfigError):
        ifrk.Stepper(op, term, "RK5", 0.01)
    with pytest.raises(ifrk.GridMismatch):
        ifrk.Stepper(op, term, "IFRK4", 0.01).step(np.zeros(5))


def test_run_coarsening_from_dict():
    runs = ifrk.run_coarsening({"points": 16, "t_end": 0.4, "schemes": ["IFRK2"], "taus": [0.08]})
    assert len(runs) == 1
    assert runs[0]["steps"] == 5
    assert runs[0]["t"][-1] == 0.4

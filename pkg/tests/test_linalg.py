"""Dense complex direct solver and its fallback."""

import numpy as np
import pytest

from hyperbem.linalg import SolveError, lu_solve, solve_system


def test_lu_solve_random_complex():
    rng = np.random.default_rng(7)
    A = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))
    x = rng.normal(size=40) + 1j * rng.normal(size=40)
    got = lu_solve(A, A @ x)
    np.testing.assert_allclose(got, x, rtol=1e-10)


def test_lu_solve_rejects_singular():
    A = np.zeros((3, 3), dtype=complex)
    with pytest.raises(SolveError):
        lu_solve(A, np.ones(3, dtype=complex))


def test_lu_solve_rejects_nonfinite():
    A = np.eye(3, dtype=complex)
    A[1, 1] = np.nan
    with pytest.raises(SolveError):
        lu_solve(A, np.ones(3, dtype=complex))


def test_solve_system_falls_back_to_least_squares():
    # consistent but rank-deficient system: minimum-norm solution
    A = np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
    b = np.array([2.0, 2.0], dtype=complex)
    x = solve_system(A, b)
    np.testing.assert_allclose(A @ x, b, atol=1e-12)
    np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-12)


def test_solve_system_matches_lu_when_regular():
    rng = np.random.default_rng(11)
    A = rng.normal(size=(25, 25)) + 1j * rng.normal(size=(25, 25))
    b = rng.normal(size=25) + 1j * rng.normal(size=25)
    np.testing.assert_allclose(solve_system(A, b), lu_solve(A, b), rtol=1e-12)

"""Dense direct solve for the assembled block systems."""

from __future__ import annotations

import warnings

import numpy as np
from scipy import linalg as _sla

__all__ = ["SolveError", "lu_solve", "solve_system"]


class SolveError(RuntimeError):
    """Raised when the block system cannot be solved reliably."""


def lu_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b by LU factorization with partial pivoting.

    Raises :class:`SolveError` on singular or numerically unusable factors.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if b.shape[0] != a.shape[0]:
        raise ValueError("right-hand side has wrong length")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise SolveError("non-finite entries in the linear system")
    try:
        lu, piv = _sla.lu_factor(a)
    except _sla.LinAlgError as exc:
        raise SolveError(str(exc)) from exc
    diag = np.abs(np.diag(lu))
    if not np.all(np.isfinite(lu)) or np.any(diag == 0.0):
        raise SolveError("singular pivot encountered in LU factorization")
    (gecon,) = _sla.get_lapack_funcs(("gecon",), (lu,))
    rcond, info = gecon(lu, np.linalg.norm(a, 1), norm="1")
    if info != 0 or not np.isfinite(rcond) or rcond < 1e-12:
        raise SolveError(f"system is numerically singular (rcond={rcond:.1e})")
    x = _sla.lu_solve((lu, piv), b)
    if not np.all(np.isfinite(x)):
        raise SolveError("non-finite values in solve result")
    return x


def solve_system(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """LU solve with a least-squares fallback for rank-deficient systems.

    The transmission blocks cancel exactly when both media coincide; the
    remaining mass pairing is singular on closed curves with an even element
    count (the alternating function is orthogonal to all constants), so that
    degenerate case is solved in the minimum-norm sense instead.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _sla.LinAlgWarning)
        try:
            return lu_solve(a, b)
        except SolveError:
            x = np.linalg.lstsq(np.asarray(a), np.asarray(b), rcond=1e-12)[0]
            if not np.all(np.isfinite(x)):
                raise
            return x
